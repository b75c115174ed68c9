//! Partition enumeration and index bookkeeping.
//!
//! Everything downstream (state enumeration, basis ordering) inherits the
//! frozen orders defined here, so the enumeration order in this module must
//! never change.

use serde::{Deserialize, Serialize};

/// A partition: weakly decreasing positive parts.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Partition(Vec<u64>);

/// A fermionic partition: strictly decreasing positive parts.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct FermionicPartition(Vec<u64>);

/// A partition with every part shifted by a fixed integer offset.
/// Parts may become zero or negative after shifting.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ShiftedSequence(Vec<i64>);

impl Partition {
    /// Build from parts; fails if parts are not weakly decreasing or contain 0.
    pub fn new(parts: Vec<u64>) -> Option<Self> {
        if parts.windows(2).any(|w| w[0] < w[1]) || parts.iter().any(|&p| p == 0) {
            return None;
        }
        Some(Partition(parts))
    }

    pub fn empty() -> Self {
        Partition(Vec::new())
    }

    pub fn parts(&self) -> &[u64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Sum of the parts.
    pub fn weight(&self) -> u64 {
        self.0.iter().sum()
    }

    /// Number of parts equal to `n`.
    pub fn multiplicity(&self, n: u64) -> usize {
        self.0.iter().filter(|&&p| p == n).count()
    }

    /// Shift every part by `m` (parts may leave the positive range).
    pub fn shift(&self, m: i64) -> ShiftedSequence {
        ShiftedSequence(self.0.iter().map(|&p| p as i64 + m).collect())
    }
}

impl FermionicPartition {
    /// Build from parts; fails unless strictly decreasing and positive.
    pub fn new(parts: Vec<u64>) -> Option<Self> {
        if parts.windows(2).any(|w| w[0] <= w[1]) || parts.iter().any(|&p| p == 0) {
            return None;
        }
        Some(FermionicPartition(parts))
    }

    pub fn empty() -> Self {
        FermionicPartition(Vec::new())
    }

    pub fn parts(&self) -> &[u64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn weight(&self) -> u64 {
        self.0.iter().sum()
    }

    pub fn shift(&self, m: i64) -> ShiftedSequence {
        ShiftedSequence(self.0.iter().map(|&p| p as i64 + m).collect())
    }
}

impl ShiftedSequence {
    pub fn entries(&self) -> &[i64] {
        &self.0
    }
}

/// All partitions of `n` with parts at least `min_part`, in reverse
/// lexicographic order (largest first part first).  `n = 0` yields the empty
/// partition.  This order is frozen.
pub fn enumerate_partitions_min(n: u64, min_part: u64) -> Vec<Partition> {
    let mut out = Vec::new();
    let mut cur: Vec<u64> = Vec::new();
    rec_partitions(n, n, min_part.max(1), &mut cur, &mut out);
    out
}

fn rec_partitions(rem: u64, max_part: u64, min_part: u64, cur: &mut Vec<u64>, out: &mut Vec<Partition>) {
    if rem == 0 {
        out.push(Partition(cur.clone()));
        return;
    }
    let hi = rem.min(max_part);
    if hi < min_part {
        return;
    }
    // descending first part gives reverse lexicographic order
    let mut p = hi;
    loop {
        cur.push(p);
        rec_partitions(rem - p, p, min_part, cur, out);
        cur.pop();
        if p == min_part {
            break;
        }
        p -= 1;
    }
}

/// All partitions of `n`, reverse lexicographic, frozen order.
pub fn enumerate_partitions(n: u64) -> Vec<Partition> {
    enumerate_partitions_min(n, 1)
}

/// All strictly decreasing partitions of `n` with parts at least `min_part`,
/// reverse lexicographic.
pub fn enumerate_fermionic_min(n: u64, min_part: u64) -> Vec<FermionicPartition> {
    let mut out = Vec::new();
    let mut cur: Vec<u64> = Vec::new();
    rec_fermionic(n, n, min_part.max(1), &mut cur, &mut out);
    out
}

fn rec_fermionic(rem: u64, max_part: u64, min_part: u64, cur: &mut Vec<u64>, out: &mut Vec<FermionicPartition>) {
    if rem == 0 {
        out.push(FermionicPartition(cur.clone()));
        return;
    }
    let hi = rem.min(max_part);
    if hi < min_part {
        return;
    }
    let mut p = hi;
    loop {
        cur.push(p);
        if p > 0 {
            rec_fermionic(rem - p, p.saturating_sub(1), min_part, cur, out);
        }
        cur.pop();
        if p == min_part {
            break;
        }
        p -= 1;
    }
}

/// All strictly decreasing partitions of `n`, reverse lexicographic.
pub fn enumerate_fermionic(n: u64) -> Vec<FermionicPartition> {
    enumerate_fermionic_min(n, 1)
}
