//! Truncated reduction complexes and their differential.
//!
//! The differential `D` is the zero mode of the reduction current.  Its
//! action is determined by the mode commutators
//!
//! ```text
//!   [D, dt_n] = ps_n        {D, ph_n} = ec_n + delta_{n,0}
//!   [D, ec_n] = [D, ps_n] = 0
//! ```
//!
//! together with its action on the sector generating states: zero at
//! non-negative flow, and `sum_{n=1..-flow} (ec_n action) (x) ps_{-n}` at
//! negative flow (where `ec_{-flow}` raises `mu_offset` and every smaller
//! positive index would create a lattice mode).
//!
//! Truncation policy.  `D` preserves the conformal grade exactly, so a grade
//! cutoff is exact.  Two directions of the state space are *not* bounded by
//! the grade and get windows whose boundary states are excluded so that the
//! enumerated span stays a subcomplex (a quotient truncation would create
//! spurious kernel classes):
//!
//! * the `mu_offset` ladder gets the window `[0, W]`, and at the top edge the
//!   states on which the mu raise could fire are excluded — for flow >= 0
//!   those with `-flow` in `ph`, for flow < 0 those missing `flow` from `ps`;
//! * at negative flow the lattice modes `ec_n` with `0 <= n < -flow` have
//!   non-positive grade cost, so each such tower is held in its minimal
//!   differential-stable window: multiplicity zero, with the paired ghost
//!   direction frozen (no `ph` entry at 0, and the dressing entries
//!   `-1, ..., flow+1` of `ps` always occupied).  Each such tower carries a
//!   one-dimensional cohomology in its zero position, so this truncation is
//!   exact for every Betti number; only the mu edge leaves an artifact,
//!   which window-shifting detects.

use crate::exactlin::{LinError, Rational, SparseMatrix};
use crate::fock::{normal_order, FockError, FockState, LinComb, ModeOp};
use num::One;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum BrstError {
    #[error("invalid truncation: {0}")]
    InvalidTruncation(String),
    #[error("window leakage: differential of {state} leaves the enumerated span at {target}")]
    WindowLeakage { state: String, target: String },
    #[error(transparent)]
    Fock(#[from] FockError),
    #[error(transparent)]
    Lin(#[from] LinError),
}

/// Parameters of a finite truncation of the reduction complex.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TruncationSpec {
    pub flow: i64,
    /// Exact conformal grade cutoff (inclusive).
    pub max_grade: i64,
    /// Width of the mu window: offsets 0..=window are enumerated.
    pub window: i64,
    /// Graded dimensions of the external module factor; `{0: 1}` is the
    /// trivial module.  Keys must lie in `0..=max_grade`.
    pub module_dims: BTreeMap<i64, usize>,
}

impl TruncationSpec {
    pub fn new(flow: i64, max_grade: i64, window: i64) -> Self {
        let mut module_dims = BTreeMap::new();
        module_dims.insert(0, 1);
        TruncationSpec { flow, max_grade, window, module_dims }
    }

    pub fn with_module_dims(mut self, dims: BTreeMap<i64, usize>) -> Self {
        self.module_dims = dims;
        self
    }

    pub fn validate(&self) -> Result<(), BrstError> {
        if self.max_grade < 0 {
            return Err(BrstError::InvalidTruncation("max_grade must be non-negative".into()));
        }
        if self.window < 0 {
            return Err(BrstError::InvalidTruncation("window must be non-negative".into()));
        }
        if self.module_dims.is_empty() {
            return Err(BrstError::InvalidTruncation("module_dims must not be empty".into()));
        }
        if self.module_dims.keys().any(|&g| g < 0 || g > self.max_grade) {
            return Err(BrstError::InvalidTruncation(
                "module_dims must be supported on grades 0..=max_grade".into(),
            ));
        }
        Ok(())
    }
}

/// One graded piece of the truncated complex, with its outgoing boundary
/// matrix (rows indexed by the basis at ghost+1, same grade).
#[derive(Debug, Clone)]
pub struct ComplexBlock {
    pub ghost: i64,
    pub grade: i64,
    pub basis: Vec<FockState>,
    pub boundary: SparseMatrix,
}

/// A fully assembled truncated complex: every non-empty block in the grade
/// range, keyed by (ghost, grade).
#[derive(Debug, Clone)]
pub struct Complex {
    pub spec: TruncationSpec,
    pub mu_lo: i64,
    pub mu_hi: i64,
    pub blocks: BTreeMap<(i64, i64), ComplexBlock>,
}

impl Complex {
    pub fn block(&self, ghost: i64, grade: i64) -> Option<&ComplexBlock> {
        self.blocks.get(&(ghost, grade))
    }

    pub fn dim(&self, ghost: i64, grade: i64) -> usize {
        self.block(ghost, grade).map_or(0, |b| b.basis.len())
    }

    /// Plain-text dump of one block: basis states, then matrix triplets.
    pub fn render_block(&self, ghost: i64, grade: i64) -> String {
        let mut out = String::new();
        let Some(b) = self.block(ghost, grade) else {
            return format!("block ghost {ghost} grade {grade}: empty\n");
        };
        out.push_str(&format!(
            "block ghost {ghost} grade {grade}: dim {} -> dim {}\n",
            b.basis.len(),
            self.dim(ghost + 1, grade)
        ));
        for s in &b.basis {
            out.push_str(&s.render());
            out.push('\n');
        }
        for (r, c, v) in b.boundary.iter() {
            out.push_str(&format!("{r} {c} {v}\n"));
        }
        out
    }
}

// ---------------------------------------------------------------------------
// Enumeration
// ---------------------------------------------------------------------------

/// Is this state inside the enumerated span for the given truncation window?
/// (The tower freezing at negative flow plus the mu-edge exclusion.)
fn state_included(s: &FockState, flow: i64, mu_hi: i64) -> bool {
    if flow < 0 {
        // tower windows: no lattice modes of non-positive cost, no ph entry
        // at zero, dressing entries above the raiser always occupied, and
        // no boson modes shallower than the dressing depth (their pairing
        // with the mu ladder is acyclic, so freezing them is exact; keeping
        // them would strand one unremovable class per grade at the window's
        // bottom edge)
        if s.ec.iter().any(|&n| n >= 0) || s.ph.contains(&0) {
            return false;
        }
        if s.dt.iter().any(|&n| n >= flow) {
            return false;
        }
        for j in 1..(-flow) {
            if !s.ps.contains(&(-j)) {
                return false;
            }
        }
    }
    if s.mu_offset == mu_hi {
        // mu edge: exclude states on which the raise could fire
        if flow >= 0 {
            if s.ph.contains(&(-flow)) {
                return false;
            }
        } else if !s.ps.contains(&flow) {
            return false;
        }
    }
    s.mu_offset <= mu_hi
}

/// Enumerate every state of the truncated complex at the given mu window,
/// grouped by (ghost, grade).  Deterministic: the basis order within a block
/// is the canonical state order.
fn enumerate_all(
    flow: i64,
    max_grade: i64,
    mu_lo: i64,
    mu_hi: i64,
) -> BTreeMap<(i64, i64), Vec<FockState>> {
    use crate::combinatorics::{enumerate_fermionic_min, enumerate_partitions_min};

    let mut out: BTreeMap<(i64, i64), Vec<FockState>> = BTreeMap::new();
    // fixed dressing for negative flow (towers frozen): ps always contains
    // -1..=flow+1; the raiser slot `flow` stays free.
    let dressing: Vec<i64> = if flow < 0 { (1..(-flow)).map(|j| -j).collect() } else { Vec::new() };
    let dressing_cost: i64 = dressing.iter().map(|&i| -i).sum();

    // minimal part sizes per family
    let ec_min: u64 = if flow >= 0 { (flow + 1) as u64 } else { 1 };
    // at negative flow, boson modes shallower than the dressing are frozen
    // out along with the towers (see state_included)
    let dt_min: u64 = if flow < 0 { (1 - flow) as u64 } else { 1 };
    // extra ps entries beyond the dressing: anything <= -1 not colliding with
    // the dressing; at negative flow the slots -1..flow+1 are taken, so free
    // entries are <= flow (parts >= -flow).
    let ps_min: u64 = if flow < 0 { (-flow) as u64 } else { 1 };
    // ph entries: strictly negative parts (plus an optional zero entry at
    // non-negative flow; at negative flow the zero slot is frozen out).
    let allow_ph_zero = flow >= 0;

    for m in mu_lo..=mu_hi {
        let budget = max_grade - flow * m - dressing_cost;
        if budget < 0 {
            continue;
        }
        for total in 0..=budget as u64 {
            for s_dt in 0..=total {
                let dts = enumerate_partitions_min(s_dt, dt_min);
                for s_ec in 0..=(total - s_dt) {
                    let ecs = enumerate_partitions_min(s_ec, ec_min);
                    if ecs.is_empty() {
                        continue;
                    }
                    for s_ph in 0..=(total - s_dt - s_ec) {
                        let s_ps = total - s_dt - s_ec - s_ph;
                        let phs = enumerate_fermionic_min(s_ph, 1);
                        let pss = enumerate_fermionic_min(s_ps, ps_min);
                        if phs.is_empty() || pss.is_empty() {
                            continue;
                        }
                        for dt_p in &dts {
                            for ec_p in &ecs {
                                for ph_p in &phs {
                                    for ps_p in &pss {
                                        for ph_zero in [false, true] {
                                            if ph_zero && !allow_ph_zero {
                                                continue;
                                            }
                                            let dt: Vec<i64> =
                                                dt_p.parts().iter().map(|&p| -(p as i64)).collect();
                                            let ec: Vec<i64> =
                                                ec_p.parts().iter().map(|&p| -(p as i64)).collect();
                                            let mut ph: Vec<i64> =
                                                ph_p.parts().iter().map(|&p| -(p as i64)).collect();
                                            if ph_zero {
                                                ph.push(0);
                                            }
                                            let mut ps: Vec<i64> =
                                                ps_p.parts().iter().map(|&p| -(p as i64)).collect();
                                            ps.extend_from_slice(&dressing);
                                            ps.sort_unstable();
                                            let mut st = FockState::vacuum(flow, m);
                                            st.dt = dt;
                                            st.ec = ec;
                                            st.ph = ph;
                                            st.ps = ps;
                                            debug_assert!(st.validate().is_ok(), "{st}");
                                            if state_included(&st, flow, mu_hi) {
                                                out.entry((st.ghost(), st.grade()))
                                                    .or_default()
                                                    .push(st);
                                            }
                                        }
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    for states in out.values_mut() {
        states.sort();
        states.dedup();
    }
    out
}

/// Enumerate the basis of the block at the given ghost and grade.
pub fn enumerate_block(spec: &TruncationSpec, ghost: i64, grade: i64) -> Result<Vec<FockState>, BrstError> {
    spec.validate()?;
    if grade > spec.max_grade {
        return Err(BrstError::InvalidTruncation(format!(
            "grade {grade} exceeds max_grade {}",
            spec.max_grade
        )));
    }
    let all = enumerate_all(spec.flow, spec.max_grade, 0, spec.window);
    Ok(all.get(&(ghost, grade)).cloned().unwrap_or_default())
}

// ---------------------------------------------------------------------------
// Differential, route 1: the commutator walk.
// ---------------------------------------------------------------------------

/// Apply the differential to a canonical state by walking `D` through the
/// monomial with the mode commutators and then acting on the generating
/// state.  This is the production route.
pub fn differential_commutator(state: &FockState) -> Result<LinComb, FockError> {
    state.validate()?;
    let word = state.word();
    let base = FockState::vacuum(state.flow(), state.mu_offset);
    let mut out = LinComb::zero();
    let mut fermions_passed = 0usize;
    for (i, op) in word.iter().enumerate() {
        let sign = if fermions_passed % 2 == 0 { Rational::one() } else { -Rational::one() };
        match op.family {
            crate::fock::Family::Dt => {
                // [D, dt_n] = ps_n, inserted in place
                let mut w = word.clone();
                w[i] = ModeOp::ps(op.index);
                let mut piece = normal_order(&w, &base)?;
                piece.scale(&sign);
                out.add(&piece);
            }
            crate::fock::Family::Ph => {
                // {D, ph_n} = ec_n + delta_{n,0}
                let mut w = word.clone();
                w[i] = ModeOp::ec(op.index);
                let mut piece = normal_order(&w, &base)?;
                piece.scale(&sign);
                out.add(&piece);
                if op.index == 0 {
                    let mut w2 = word.clone();
                    w2.remove(i);
                    let mut piece2 = normal_order(&w2, &base)?;
                    piece2.scale(&sign);
                    out.add(&piece2);
                }
            }
            _ => {} // [D, ec] = [D, ps] = 0
        }
        if op.is_fermionic() {
            fermions_passed += 1;
        }
    }
    // action on the generating state (non-zero only at negative flow)
    if state.flow() < 0 {
        let sign = if fermions_passed % 2 == 0 { Rational::one() } else { -Rational::one() };
        for n in 1..=(-state.flow()) {
            let mut w = word.clone();
            w.push(ModeOp::ec(n));
            w.push(ModeOp::ps(-n));
            let mut piece = normal_order(&w, &base)?;
            piece.scale(&sign);
            out.add(&piece);
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Differential, route 2: closed-form expansions (verification oracle).
// ---------------------------------------------------------------------------

/// Apply the differential via the closed-form term-by-term expansions over
/// the distinguished monomial basis (one expansion per flow sign).  Agrees
/// with `differential_commutator` on every basis state; kept as an
/// independent oracle.
pub fn differential_lemma(state: &FockState) -> Result<LinComb, FockError> {
    state.validate()?;
    let flow = state.flow();
    if flow >= 0 {
        differential_lemma_nonneg(state)
    } else {
        differential_lemma_negative(state)
    }
}

fn delete_at(v: &[ModeOp], i: usize) -> Vec<ModeOp> {
    let mut w = v.to_vec();
    w.remove(i);
    w
}

/// Non-negative flow: the basis monomial is already in bare order
/// `dt ec ph ps` on the bare generating state.
fn differential_lemma_nonneg(state: &FockState) -> Result<LinComb, FockError> {
    let flow = state.flow();
    let word = state.word();
    let base = FockState::vacuum(flow, state.mu_offset);
    let mut out = LinComb::zero();

    // term group 1: each dt mode replaced by the matching ps mode, in place
    for (i, op) in word.iter().enumerate() {
        if op.family == crate::fock::Family::Dt {
            let mut w = word.clone();
            w[i] = ModeOp::ps(op.index);
            out.add(&normal_order(&w, &base)?);
        }
    }
    // ph modes: indices -kappa_j + 1 with kappa strictly decreasing, so the
    // j-th ph entry in increasing index order is the j-th kappa part from
    // the largest; the alternating sign is (-1)^{j} counting from zero.
    let ph_offset = state.dt.len() + state.ec.len();
    for (j, &idx) in state.ph.iter().enumerate() {
        let kappa = 1 - idx; // >= 1
        let sign = if j % 2 == 0 { Rational::one() } else { -Rational::one() };
        let pos = ph_offset + j;
        if kappa > flow + 1 {
            // term group 2: lattice creation in place of the ghost
            let mut w = word.clone();
            w[pos] = ModeOp::ec(idx);
            let mut piece = normal_order(&w, &base)?;
            piece.scale(&sign);
            out.add(&piece);
        } else if kappa == flow + 1 && flow > 0 {
            // term group 3 (positive flow): the raise, ghost deleted
            let w = delete_at(&word, pos);
            let mut raised = base.clone();
            raised.mu_offset += 1;
            let mut piece = normal_order(&w, &raised)?;
            piece.scale(&sign);
            out.add(&piece);
        } else if kappa == 1 {
            // last ghost entry at index zero
            debug_assert_eq!(j, state.ph.len() - 1);
            let w = delete_at(&word, pos);
            if flow == 0 {
                // raise plus identity: two terms
                let mut raised = base.clone();
                raised.mu_offset += 1;
                let mut piece = normal_order(&w, &raised)?;
                piece.scale(&sign);
                out.add(&piece);
            }
            let mut piece = normal_order(&w, &base)?;
            piece.scale(&sign);
            out.add(&piece);
        }
        // 1 < kappa <= flow: the lattice mode annihilates; no term
    }
    Ok(out)
}

/// Negative flow: convert the bare state to the dressed-basis monomial
/// (ghost indices shifted by the flow, dressing holes read as positive
/// ghost modes), expand over that basis, and normal-order every term.
fn differential_lemma_negative(state: &FockState) -> Result<LinComb, FockError> {
    let flow = state.flow();
    let ell = -flow; // > 0
    let dressed_vac = {
        let mut v = FockState::vacuum(flow, state.mu_offset);
        v.ps = (1..=ell).map(|j| -j).collect();
        v.ps.sort_unstable();
        v
    };
    // dressed ghost indices: ph entries as stored, plus one positive index
    // per dressing hole in -1..=-ell
    let mut phi: Vec<i64> = state.ph.clone();
    for j in 1..=ell {
        if !state.ps.contains(&(-j)) {
            phi.push(j);
        }
    }
    phi.sort_unstable();
    // dressed ps modes: entries below the dressing range
    let nu: Vec<i64> = state.ps.iter().cloned().filter(|&i| i < -ell).collect();

    let word: Vec<ModeOp> = state
        .dt
        .iter()
        .map(|&i| ModeOp::dt(i))
        .chain(state.ec.iter().map(|&i| ModeOp::ec(i)))
        .chain(phi.iter().map(|&i| ModeOp::ph(i)))
        .chain(nu.iter().map(|&i| ModeOp::ps(i)))
        .collect();

    // the dressed monomial reproduces the bare state up to a sign
    let eps = {
        let nf = normal_order(&word, &dressed_vac)?;
        debug_assert_eq!(nf.len(), 1, "dressed word must reduce to the bare state");
        let c = nf.coeff(state);
        debug_assert!(!num::Zero::is_zero(&c), "dressed word must reduce to {state}");
        c
    };

    let mut out = LinComb::zero();
    for (i, op) in word.iter().enumerate() {
        if op.family == crate::fock::Family::Dt {
            let mut w = word.clone();
            w[i] = ModeOp::ps(op.index);
            out.add(&normal_order(&w, &dressed_vac)?);
        }
    }
    let ph_offset = state.dt.len() + state.ec.len();
    for (j, &idx) in phi.iter().enumerate() {
        // dressed index = -kappa_j + 1 - flow, kappa_j >= 1
        let kappa = 1 - idx + ell;
        debug_assert!(kappa >= 1);
        let sign = if j % 2 == 0 { Rational::one() } else { -Rational::one() };
        let pos = ph_offset + j;
        if kappa == 1 {
            // the raiser ghost: mu raise, ghost deleted
            debug_assert_eq!(j, phi.len() - 1);
            let w = delete_at(&word, pos);
            let mut raised = dressed_vac.clone();
            raised.mu_offset += 1;
            let mut piece = normal_order(&w, &raised)?;
            piece.scale(&sign);
            out.add(&piece);
        } else {
            // lattice creation in place of the ghost (always a creation
            // index at negative flow), plus the identity term at index zero
            let mut w = word.clone();
            w[pos] = ModeOp::ec(idx);
            let mut piece = normal_order(&w, &dressed_vac)?;
            piece.scale(&sign);
            out.add(&piece);
            if idx == 0 {
                let w2 = delete_at(&word, pos);
                let mut piece2 = normal_order(&w2, &dressed_vac)?;
                piece2.scale(&sign);
                out.add(&piece2);
            }
        }
    }
    // undo the conversion sign (eps is +-1)
    out.scale(&eps);
    Ok(out)
}

// ---------------------------------------------------------------------------
// Matrix assembly
// ---------------------------------------------------------------------------

fn build_matrix_from_bases(
    source: &[FockState],
    target: &[FockState],
    flow: i64,
    mu_hi: i64,
) -> Result<SparseMatrix, BrstError> {
    let index: BTreeMap<&FockState, usize> = target.iter().enumerate().map(|(i, s)| (s, i)).collect();
    let mut triplets = Vec::new();
    for (j, s) in source.iter().enumerate() {
        let image = differential_commutator(s)?;
        for (t, c) in image.iter() {
            match index.get(t) {
                Some(&i) => triplets.push((i, j, c.clone())),
                None => {
                    debug_assert!(!state_included(t, flow, mu_hi) || t.grade() != s.grade());
                    return Err(BrstError::WindowLeakage {
                        state: s.render(),
                        target: t.render(),
                    });
                }
            }
        }
    }
    Ok(SparseMatrix::from_triplets(target.len(), source.len(), triplets)?)
}

/// The boundary matrix from the block (ghost, grade) to (ghost+1, grade).
pub fn build_matrix(spec: &TruncationSpec, ghost: i64, grade: i64) -> Result<SparseMatrix, BrstError> {
    let source = enumerate_block(spec, ghost, grade)?;
    let target = enumerate_block(spec, ghost + 1, grade)?;
    build_matrix_from_bases(&source, &target, spec.flow, spec.window)
}

/// Assemble the whole truncated complex for a custom mu window.  Used by
/// the stabilization pass; ordinary callers use [`build_complex`].
pub fn build_complex_windowed(spec: &TruncationSpec, mu_lo: i64, mu_hi: i64) -> Result<Complex, BrstError> {
    spec.validate()?;
    let all = enumerate_all(spec.flow, spec.max_grade, mu_lo, mu_hi);
    let mut blocks = BTreeMap::new();
    for (&(ghost, grade), basis) in &all {
        let empty = Vec::new();
        let target = all.get(&(ghost + 1, grade)).unwrap_or(&empty);
        let boundary = build_matrix_from_bases(basis, target, spec.flow, mu_hi)?;
        blocks.insert(
            (ghost, grade),
            ComplexBlock { ghost, grade, basis: basis.clone(), boundary },
        );
    }
    Ok(Complex { spec: spec.clone(), mu_lo, mu_hi, blocks })
}

/// Assemble the truncated complex over the standard window `[0, window]`.
pub fn build_complex(spec: &TruncationSpec) -> Result<Complex, BrstError> {
    build_complex_windowed(spec, 0, spec.window)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlin::rat;

    fn one() -> Rational {
        Rational::one()
    }

    #[test]
    fn differential_of_two_dt_modes() {
        // D (dt_{-2} dt_{-1}) = dt_{-1} ps_{-2} + ps_{-3} + dt_{-2} ps_{-1}
        let s = FockState::with_modes(0, 0, vec![-2, -1], vec![], vec![], vec![]).unwrap();
        let d = differential_commutator(&s).unwrap();
        assert_eq!(d.len(), 3);
        let t1 = FockState::with_modes(0, 0, vec![-1], vec![], vec![], vec![-2]).unwrap();
        let t2 = FockState::with_modes(0, 0, vec![], vec![], vec![], vec![-3]).unwrap();
        let t3 = FockState::with_modes(0, 0, vec![-2], vec![], vec![], vec![-1]).unwrap();
        assert_eq!(d.coeff(&t1), one());
        assert_eq!(d.coeff(&t2), one());
        assert_eq!(d.coeff(&t3), one());
    }

    #[test]
    fn differential_of_zero_mode_ghost_raises_mu() {
        // flow 0: D ph_0 |mu> = |mu> + |mu+1>
        let s = FockState::with_modes(0, 0, vec![], vec![], vec![0], vec![]).unwrap();
        let d = differential_commutator(&s).unwrap();
        assert_eq!(d.len(), 2);
        assert_eq!(d.coeff(&FockState::vacuum(0, 0)), one());
        assert_eq!(d.coeff(&FockState::vacuum(0, 1)), one());
    }

    #[test]
    fn differential_raise_at_positive_flow() {
        // flow 1: D ph_{-1} |mu> = |mu+1>
        let s = FockState::with_modes(1, 0, vec![], vec![], vec![-1], vec![]).unwrap();
        let d = differential_commutator(&s).unwrap();
        assert_eq!(d.len(), 1);
        assert_eq!(d.coeff(&FockState::vacuum(1, 1)), one());
    }

    #[test]
    fn dressed_vacuum_is_closed_at_negative_flow() {
        for ell in 1..=3i64 {
            let mut v = FockState::vacuum(-ell, 0);
            v.ps = (1..=ell).map(|j| -j).collect();
            v.ps.sort_unstable();
            let d = differential_commutator(&v).unwrap();
            assert!(d.is_zero(), "flow {}", -ell);
        }
    }

    #[test]
    fn bare_vacuum_at_negative_flow_fills_the_raiser_slot() {
        // flow -1: D |mu> = ps_{-1} |mu+1>
        let v = FockState::vacuum(-1, 0);
        let d = differential_commutator(&v).unwrap();
        let t = FockState::with_modes(-1, 1, vec![], vec![], vec![], vec![-1]).unwrap();
        assert_eq!(d.len(), 1);
        assert_eq!(d.coeff(&t), one());
    }

    #[test]
    fn differential_preserves_grade_and_raises_ghost() {
        for flow in -2..=2i64 {
            let spec = TruncationSpec::new(flow, 4, 3);
            let cx = build_complex(&spec).unwrap();
            for block in cx.blocks.values() {
                for s in &block.basis {
                    let d = differential_commutator(s).unwrap();
                    for (t, _) in d.iter() {
                        assert_eq!(t.grade(), s.grade(), "{s} -> {t}");
                        assert_eq!(t.ghost(), s.ghost() + 1, "{s} -> {t}");
                    }
                }
            }
        }
    }

    #[test]
    fn d_squared_zero_small_grid() {
        for flow in -2..=2i64 {
            let spec = TruncationSpec::new(flow, 5, 3);
            let cx = build_complex(&spec).unwrap();
            for (&(ghost, grade), block) in &cx.blocks {
                if let Some(next) = cx.block(ghost + 1, grade) {
                    let dd = next.boundary.compose(&block.boundary).unwrap();
                    assert!(dd.is_zero(), "flow {flow} block ({ghost},{grade})");
                }
            }
        }
    }

    #[test]
    fn lemma_route_agrees_with_commutator_route() {
        for flow in -2..=2i64 {
            let spec = TruncationSpec::new(flow, 4, 2);
            let cx = build_complex(&spec).unwrap();
            for block in cx.blocks.values() {
                for s in &block.basis {
                    let a = differential_commutator(s).unwrap();
                    let b = differential_lemma(s).unwrap();
                    assert_eq!(a, b, "state {s}");
                }
            }
        }
    }

    #[test]
    fn window_edge_exclusion_at_flow_zero() {
        // at the mu edge the zero-mode ghost is excluded
        let spec = TruncationSpec::new(0, 0, 2);
        let basis = enumerate_block(&spec, -1, 0).unwrap();
        let mus: Vec<i64> = basis.iter().filter(|s| s.ph.contains(&0)).map(|s| s.mu_offset).collect();
        assert_eq!(mus, vec![0, 1]);
    }

    #[test]
    fn window_edge_exclusion_at_negative_flow() {
        let spec = TruncationSpec::new(-1, 2, 2);
        let cx = build_complex(&spec).unwrap();
        for block in cx.blocks.values() {
            for s in &block.basis {
                if s.mu_offset == 2 {
                    assert!(s.ps.contains(&-1), "{s}");
                }
            }
        }
    }

    #[test]
    fn enumeration_respects_grade_and_ghost() {
        let spec = TruncationSpec::new(1, 4, 2);
        for ghost in -3..=3 {
            for grade in 0..=4 {
                for s in enumerate_block(&spec, ghost, grade).unwrap() {
                    assert_eq!(s.ghost(), ghost);
                    assert_eq!(s.grade(), grade);
                    assert!(s.validate().is_ok());
                }
            }
        }
    }

    #[test]
    fn flow_zero_block_dimensions_small() {
        // grade 0, ghost 0 at flow 0: the vacua |mu>, mu = 0..=W
        let spec = TruncationSpec::new(0, 3, 3);
        let b = enumerate_block(&spec, 0, 0).unwrap();
        assert_eq!(b.len(), 4);
        // grade 1, ghost -1: ph_{-1}|mu> for all 4 offsets, plus dt_{-1} ph_0
        // and ec_{-1} ph_0 away from the excluded edge (3 offsets each)
        let b2 = enumerate_block(&spec, -1, 1).unwrap();
        assert_eq!(b2.len(), 10);
        assert_eq!(b2.iter().filter(|s| s.ph == vec![-1]).count(), 4);
    }

    #[test]
    fn module_dims_validation() {
        let mut spec = TruncationSpec::new(0, 2, 2);
        spec.module_dims.insert(5, 1);
        assert!(spec.validate().is_err());
        let spec2 = TruncationSpec::new(0, -1, 2);
        assert!(spec2.validate().is_err());
    }

    #[test]
    fn render_block_lists_basis_and_triplets() {
        let spec = TruncationSpec::new(0, 1, 1);
        let cx = build_complex(&spec).unwrap();
        let text = cx.render_block(-1, 1);
        assert!(text.contains("ph[-1]"));
        assert!(text.lines().count() >= 2);
    }

    #[test]
    fn negative_flow_lemma_sign_on_dressed_word() {
        // a state whose dressed word differs from the bare order by a sign
        let s = FockState::with_modes(-2, 0, vec![-1], vec![-1], vec![-1], vec![-4, -2, -1]).unwrap();
        let a = differential_commutator(&s).unwrap();
        let b = differential_lemma(&s).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn coefficients_are_integers() {
        // entries are signed multiplicities: integers, never fractions
        let spec = TruncationSpec::new(-2, 4, 2);
        let cx = build_complex(&spec).unwrap();
        for block in cx.blocks.values() {
            for (_, _, v) in block.boundary.iter() {
                assert!(v.is_integer(), "{v}");
                assert!(v != &rat(0, 1));
            }
        }
    }
}
