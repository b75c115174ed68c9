//! Cohomology of truncated complexes: Betti tables, window-shift
//! stabilization, predictions, and the combined verification report.
//!
//! The complex never contains the external module factor; the differential
//! acts as the identity on it, so module dimensions enter purely as a grade
//! convolution on the reporting side.

use crate::brst::{
    build_complex, build_complex_windowed, differential_commutator, differential_lemma, BrstError,
    Complex, TruncationSpec,
};
use crate::structural;
use rayon::prelude::*;
use std::collections::BTreeMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stability {
    /// Single-run value; no window-shift comparison was performed.
    Unchecked,
    /// Unchanged under widening and shifting the mu window.
    Stable,
    /// Changed under the window shift: a truncation-boundary class.
    Artifact,
}

/// Cohomology dimensions indexed by (ghost, grade), with a stability flag
/// per nonzero entry.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BettiTable {
    pub entries: BTreeMap<(i64, i64), usize>,
    pub stability: BTreeMap<(i64, i64), Stability>,
}

impl BettiTable {
    pub fn dim(&self, ghost: i64, grade: i64) -> usize {
        self.entries.get(&(ghost, grade)).copied().unwrap_or(0)
    }

    pub fn total(&self) -> usize {
        self.entries.values().sum()
    }

    pub fn insert(&mut self, ghost: i64, grade: i64, dim: usize, st: Stability) {
        if dim > 0 {
            self.entries.insert((ghost, grade), dim);
            self.stability.insert((ghost, grade), st);
        }
    }

    /// Entrywise equality of dimensions (flags ignored).
    pub fn same_entries(&self, other: &BettiTable) -> bool {
        self.entries == other.entries
    }

    /// Convolve with graded multiplicities (the external module factor),
    /// keeping grades up to `max_grade`.
    pub fn convolve_dims(&self, dims: &BTreeMap<i64, usize>, max_grade: i64) -> BettiTable {
        let mut out = BettiTable::default();
        for (&(p, w), &n) in &self.entries {
            let st = self.stability[&(p, w)];
            for (&g, &m) in dims {
                if n * m == 0 || w + g > max_grade {
                    continue;
                }
                let slot = out.entries.entry((p, w + g)).or_insert(0);
                *slot += n * m;
                out.stability
                    .entry((p, w + g))
                    .and_modify(|s| {
                        if st == Stability::Artifact {
                            *s = Stability::Artifact;
                        }
                    })
                    .or_insert(st);
            }
        }
        out
    }
}

/// Cohomology dimensions of an assembled complex (vacuum normalization: no
/// module convolution).  Ranks are computed in parallel across blocks; the
/// result is deterministic regardless of thread count.
pub fn betti_of_complex(cx: &Complex) -> BettiTable {
    // warm the rank caches in parallel
    cx.blocks.par_iter().for_each(|(_, b)| {
        b.boundary.rank();
    });
    let mut out = BettiTable::default();
    for (&(ghost, grade), block) in &cx.blocks {
        let dim = block.basis.len();
        let rank_out = block.boundary.rank();
        let rank_in = cx
            .block(ghost - 1, grade)
            .map_or(0, |prev| prev.boundary.rank());
        let h = dim - rank_out - rank_in;
        out.insert(ghost, grade, h, Stability::Unchecked);
    }
    out
}

/// Raw Betti table for a truncation (module dimensions convolved in).
pub fn betti(spec: &TruncationSpec) -> Result<BettiTable, BrstError> {
    let cx = build_complex(spec)?;
    Ok(betti_of_complex(&cx).convolve_dims(&spec.module_dims, spec.max_grade))
}

/// Result of the window-shift stabilization pass.
#[derive(Debug, Clone)]
pub struct Stabilized {
    /// First-run table with artifact flags filled in.
    pub raw: BettiTable,
    /// Artifact entries zeroed; every remaining entry is stable.
    pub stabilized: BettiTable,
}

/// Recompute with the mu window widened by 2 and shifted down by 1
/// (offsets -1..=window+1); entries agreeing at matched (ghost, grade) are
/// stable, differing entries are truncation artifacts and are zeroed.
/// Requires window >= 2 so the two windows genuinely overlap.
pub fn stabilize(spec: &TruncationSpec) -> Result<Stabilized, BrstError> {
    if spec.window < 2 {
        return Err(BrstError::InvalidTruncation(
            "stabilization requires window >= 2".into(),
        ));
    }
    let run1 = betti_of_complex(&build_complex(spec)?);
    let run2 = betti_of_complex(&build_complex_windowed(spec, -1, spec.window + 1)?);
    let mut raw = BettiTable::default();
    let mut stab = BettiTable::default();
    let keys: std::collections::BTreeSet<(i64, i64)> =
        run1.entries.keys().chain(run2.entries.keys()).cloned().collect();
    for &(p, w) in &keys {
        let a = run1.dim(p, w);
        let b = run2.dim(p, w);
        let flag = if a == b { Stability::Stable } else { Stability::Artifact };
        raw.insert(p, w, a, flag);
        if flag == Stability::Stable {
            stab.insert(p, w, a, Stability::Stable);
        }
    }
    Ok(Stabilized {
        raw: raw.convolve_dims(&spec.module_dims, spec.max_grade),
        stabilized: stab.convolve_dims(&spec.module_dims, spec.max_grade),
    })
}

/// The predicted cohomology: the module dimensions at ghost zero for flow
/// zero, nothing anywhere else.
pub fn predict(spec: &TruncationSpec) -> BettiTable {
    let mut out = BettiTable::default();
    if spec.flow == 0 {
        for (&g, &m) in &spec.module_dims {
            out.insert(0, g, m, Stability::Stable);
        }
    }
    out
}

/// Exact nilpotency of the differential on every block pair.
pub fn check_d_squared(cx: &Complex) -> Result<bool, BrstError> {
    for (&(ghost, grade), block) in &cx.blocks {
        if let Some(next) = cx.block(ghost + 1, grade) {
            if !next.boundary.compose(&block.boundary)?.is_zero() {
                return Ok(false);
            }
        } else if !block.boundary.is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The differential preserves the grade and raises the ghost number by one
/// on every enumerated basis state.
pub fn check_grade_ghost(cx: &Complex) -> Result<bool, BrstError> {
    for block in cx.blocks.values() {
        for s in &block.basis {
            let d = differential_commutator(s)?;
            for (t, _) in d.iter() {
                if t.grade() != s.grade() || t.ghost() != s.ghost() + 1 {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// The closed-form expansion agrees with the commutator walk on every
/// enumerated basis state.
pub fn check_lemma_equivalence(cx: &Complex) -> Result<bool, BrstError> {
    for block in cx.blocks.values() {
        let all_ok = block
            .basis
            .par_iter()
            .map(|s| {
                let a = differential_commutator(s)?;
                let b = differential_lemma(s)?;
                Ok::<bool, BrstError>(a == b)
            })
            .collect::<Result<Vec<_>, _>>()?;
        if all_ok.iter().any(|ok| !ok) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The combined verification report for one truncation.
#[derive(Debug, Clone)]
pub struct VerifyReport {
    pub d_squared_zero: bool,
    pub grade_preserved: bool,
    pub lemma_equivalence: bool,
    pub betti_matches_prediction: bool,
    pub structural_path_agrees: bool,
    pub raw: BettiTable,
    pub stabilized: BettiTable,
    pub predicted: BettiTable,
    pub structural: BettiTable,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.d_squared_zero
            && self.grade_preserved
            && self.lemma_equivalence
            && self.betti_matches_prediction
            && self.structural_path_agrees
    }
}

/// Run every check for one truncation: nilpotency, grading, the two
/// differential routes, the stabilized Betti table against the prediction,
/// and the independent structural (factorized) computation.
pub fn verify(spec: &TruncationSpec) -> Result<VerifyReport, BrstError> {
    let cx = build_complex(spec)?;
    let d_squared_zero = check_d_squared(&cx)?;
    let grade_preserved = check_grade_ghost(&cx)?;
    let lemma_equivalence = check_lemma_equivalence(&cx)?;
    let st = stabilize(spec)?;
    let predicted = predict(spec);
    let betti_matches_prediction = st.stabilized.same_entries(&predicted);
    let structural = structural::structural_betti(spec)?;
    let structural_path_agrees = structural.same_entries(&st.stabilized);
    Ok(VerifyReport {
        d_squared_zero,
        grade_preserved,
        lemma_equivalence,
        betti_matches_prediction,
        structural_path_agrees,
        raw: st.raw,
        stabilized: st.stabilized,
        predicted,
        structural,
    })
}
