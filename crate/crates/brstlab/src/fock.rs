//! The mode-level Fock engine.
//!
//! States live in a tensor product of a half-lattice sector (modes `dt`
//! for the shifted Heisenberg current and `ec` for the exponential lattice
//! operator, plus a one-parameter family of generating states indexed by
//! `mu_offset`) and a bc ghost system (`ph` annihilation-type and `ps`
//! creation-type fermions).  Everything is stored in *bare normal form*:
//! a canonical monomial
//!
//! ```text
//!   dt[i1 <= i2 <= ...]  ec[j1 <= j2 <= ...]  ph[k1 < k2 < ...]  ps[l1 < l2 < ...]
//! ```
//!
//! applied, with coefficient +1, to the bare generating state of a fixed
//! spectral-flow sector.  At negative flow the physical generating state is
//! the ghost-dressed one; it appears here as the bare state with
//! `ps = {-1, ..., flow}` occupied.
//!
//! The commutator table used by the normal-ordering engine is exactly:
//!
//! ```text
//!   [ps_m, dt_n] = ps_{m+n}       {ph_m, ps_n} = delta_{m+n,0}
//!   {ph, ph} = {ps, ps} = 0       [ec, ec] = [ec, ph] = [ec, ps] = 0
//! ```
//!
//! together with the lattice action of `ec_n` on generating states:
//! annihilation for `n > -flow`, a `mu_offset` raise at `n = -flow`, free
//! creation for `n < -flow`.  The two brackets this table leaves undefined
//! (the central term of `[dt_m, dt_n]` at `m + n = 0`, and the `dt_0`
//! eigenvalue) are reported as errors: no differential computation ever
//! exercises them.

use crate::exactlin::Rational;
use num::{One, Zero};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FockError {
    #[error("unsupported bracket: {0}")]
    UnsupportedBracket(String),
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("unsupported mode combination: {0}")]
    UnsupportedMode(String),
}

/// The four mode families, in the frozen monomial order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Family {
    /// Shifted Heisenberg current (bosonic).
    Dt,
    /// Exponential lattice operator (bosonic).
    Ec,
    /// Ghost of weight zero (fermionic, annihilation-type at non-negative index).
    Ph,
    /// Ghost of weight one (fermionic).
    Ps,
}

/// A single mode operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ModeOp {
    pub family: Family,
    pub index: i64,
}

impl ModeOp {
    pub fn dt(index: i64) -> Self {
        ModeOp { family: Family::Dt, index }
    }
    pub fn ec(index: i64) -> Self {
        ModeOp { family: Family::Ec, index }
    }
    pub fn ph(index: i64) -> Self {
        ModeOp { family: Family::Ph, index }
    }
    pub fn ps(index: i64) -> Self {
        ModeOp { family: Family::Ps, index }
    }

    pub fn is_fermionic(&self) -> bool {
        matches!(self.family, Family::Ph | Family::Ps)
    }
}

/// A spectral-flow sector: the integer flow amount plus an opaque label for
/// the coset of the lattice generating state.  The label never enters any
/// computation; it only keeps sectors from being confused with one another.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct FlowSector {
    pub flow: i64,
    pub mu_base: String,
}

impl FlowSector {
    pub fn new(flow: i64) -> Self {
        FlowSector { flow, mu_base: "mu0".to_string() }
    }
}

/// A canonical basis state in bare normal form.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct FockState {
    pub sector: FlowSector,
    /// Position of the lattice generating state within the mu window.
    /// Non-negative in ordinary runs; the widened window used for artifact
    /// detection starts at -1.
    pub mu_offset: i64,
    /// Weakly increasing, each index <= -1.
    pub dt: Vec<i64>,
    /// Weakly increasing, each index < -flow.
    pub ec: Vec<i64>,
    /// Strictly increasing, each index <= 0.
    pub ph: Vec<i64>,
    /// Strictly increasing, each index <= -1.
    pub ps: Vec<i64>,
    /// Opaque slot for a tensor factor from an external module; the
    /// differential never touches it.
    pub module_slot: u32,
}

impl FockState {
    /// The bare generating state of a sector.
    pub fn vacuum(flow: i64, mu_offset: i64) -> Self {
        FockState {
            sector: FlowSector::new(flow),
            mu_offset,
            dt: Vec::new(),
            ec: Vec::new(),
            ph: Vec::new(),
            ps: Vec::new(),
            module_slot: 0,
        }
    }

    pub fn with_modes(flow: i64, mu_offset: i64, dt: Vec<i64>, ec: Vec<i64>, ph: Vec<i64>, ps: Vec<i64>) -> Result<Self, FockError> {
        let s = FockState { sector: FlowSector::new(flow), mu_offset, dt, ec, ph, ps, module_slot: 0 };
        s.validate()?;
        Ok(s)
    }

    pub fn flow(&self) -> i64 {
        self.sector.flow
    }

    pub fn validate(&self) -> Result<(), FockError> {
        let err = |m: String| Err(FockError::InvalidState(m));
        if self.dt.windows(2).any(|w| w[0] > w[1]) || self.dt.iter().any(|&i| i > -1) {
            return err(format!("dt indices must be weakly increasing and <= -1: {:?}", self.dt));
        }
        if self.ec.windows(2).any(|w| w[0] > w[1]) || self.ec.iter().any(|&i| i >= -self.flow()) {
            return err(format!("ec indices must be weakly increasing and < {}: {:?}", -self.flow(), self.ec));
        }
        if self.ph.windows(2).any(|w| w[0] >= w[1]) || self.ph.iter().any(|&i| i > 0) {
            return err(format!("ph indices must be strictly increasing and <= 0: {:?}", self.ph));
        }
        if self.ps.windows(2).any(|w| w[0] >= w[1]) || self.ps.iter().any(|&i| i > -1) {
            return err(format!("ps indices must be strictly increasing and <= -1: {:?}", self.ps));
        }
        Ok(())
    }

    /// Ghost number: creation-type ghosts minus annihilation-type ghosts.
    pub fn ghost(&self) -> i64 {
        self.ps.len() as i64 - self.ph.len() as i64
    }

    /// Conformal grade with respect to the reduction-adapted Virasoro zero
    /// mode, relative to the bare generating state at `mu_offset = 0`.  Each
    /// mode at index `i` contributes `-i`; each mu raise contributes `flow`.
    pub fn grade(&self) -> i64 {
        let modes: i64 = self
            .dt
            .iter()
            .chain(self.ec.iter())
            .chain(self.ph.iter())
            .chain(self.ps.iter())
            .map(|&i| -i)
            .sum();
        modes + self.flow() * self.mu_offset
    }

    /// Filtration degree of the standard vertex-algebra filtration on the
    /// Heisenberg/ghost subcomplex: a mode at index `-n` contributes `n - 1`.
    /// Only defined for states with no lattice or weight-zero-ghost modes.
    pub fn li_grade(&self) -> Result<i64, FockError> {
        if !self.ec.is_empty() || !self.ph.is_empty() {
            return Err(FockError::InvalidState(
                "filtration degree is only defined on dt/ps states".to_string(),
            ));
        }
        Ok(self
            .dt
            .iter()
            .chain(self.ps.iter())
            .map(|&i| -i - 1)
            .sum())
    }

    /// The canonical monomial as an operator word (leftmost first).
    pub fn word(&self) -> Vec<ModeOp> {
        let mut w = Vec::with_capacity(self.dt.len() + self.ec.len() + self.ph.len() + self.ps.len());
        w.extend(self.dt.iter().map(|&i| ModeOp::dt(i)));
        w.extend(self.ec.iter().map(|&i| ModeOp::ec(i)));
        w.extend(self.ph.iter().map(|&i| ModeOp::ph(i)));
        w.extend(self.ps.iter().map(|&i| ModeOp::ps(i)));
        w
    }

    /// Canonical textual rendering, e.g. `dt[-2,-1] ec[] ph[0] ps[-3] mu+1 flow-2`.
    pub fn render(&self) -> String {
        fn list(v: &[i64]) -> String {
            v.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(",")
        }
        format!(
            "dt[{}] ec[{}] ph[{}] ps[{}] mu{:+} flow{:+}",
            list(&self.dt),
            list(&self.ec),
            list(&self.ph),
            list(&self.ps),
            self.mu_offset,
            self.flow()
        )
    }
}

impl fmt::Display for FockState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render())
    }
}

/// A finite linear combination of canonical states with exact rational
/// coefficients.  Zero coefficients are dropped eagerly.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LinComb {
    terms: BTreeMap<FockState, Rational>,
}

impl LinComb {
    pub fn zero() -> Self {
        LinComb::default()
    }

    pub fn single(state: FockState, coeff: Rational) -> Self {
        let mut l = LinComb::zero();
        l.add_term(state, coeff);
        l
    }

    pub fn add_term(&mut self, state: FockState, coeff: Rational) {
        if coeff.is_zero() {
            return;
        }
        let slot = self.terms.entry(state).or_insert_with(Rational::zero);
        *slot += coeff;
        if slot.is_zero() {
            // re-borrow to remove; find the key we just zeroed
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    pub fn add(&mut self, other: &LinComb) {
        for (s, c) in &other.terms {
            self.add_term(s.clone(), c.clone());
        }
    }

    pub fn scale(&mut self, c: &Rational) {
        if c.is_zero() {
            self.terms.clear();
            return;
        }
        for v in self.terms.values_mut() {
            *v *= c.clone();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&FockState, &Rational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, state: &FockState) -> Rational {
        self.terms.get(state).cloned().unwrap_or_else(Rational::zero)
    }
}

fn int(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

/// Apply an operator word to a canonical base state, left-to-right: the
/// first element of `ops` is the leftmost operator of the product.  Returns
/// the canonical normal form as a linear combination.
pub fn normal_order(ops: &[ModeOp], base: &FockState) -> Result<LinComb, FockError> {
    base.validate()?;
    let mut lin = LinComb::single(base.clone(), Rational::one());
    for op in ops.iter().rev() {
        let mut next = LinComb::zero();
        for (state, coeff) in lin.iter() {
            let mut piece = apply_mode(*op, state)?;
            piece.scale(coeff);
            next.add(&piece);
        }
        lin = next;
    }
    Ok(lin)
}

/// Apply a single mode operator on the left of a canonical state.
pub fn apply_mode(op: ModeOp, s: &FockState) -> Result<LinComb, FockError> {
    match op.family {
        Family::Ec => apply_ec(op.index, s),
        Family::Dt => apply_dt(op.index, s),
        Family::Ph => Ok(apply_ph(op.index, s)),
        Family::Ps => Ok(apply_ps(op.index, s)),
    }
}

fn apply_ec(n: i64, s: &FockState) -> Result<LinComb, FockError> {
    let flow = s.flow();
    if n > -flow {
        return Ok(LinComb::zero()); // annihilates the lattice generating state
    }
    let mut out = s.clone();
    if n == -flow {
        out.mu_offset += 1; // the mu raise
    } else {
        let pos = out.ec.partition_point(|&e| e <= n);
        out.ec.insert(pos, n);
    }
    Ok(LinComb::single(out, Rational::one()))
}

fn apply_dt(n: i64, s: &FockState) -> Result<LinComb, FockError> {
    if n == 0 {
        return Err(FockError::UnsupportedBracket(
            "dt_0 eigenvalue on the generating state is not part of the mode table".to_string(),
        ));
    }
    if n <= -1 {
        let mut out = s.clone();
        let pos = out.dt.partition_point(|&e| e <= n);
        out.dt.insert(pos, n);
        return Ok(LinComb::single(out, Rational::one()));
    }
    // positive index: commutes through dt (distinct index sums), ec and ph,
    // then acts on ps entries via [ps_m, dt_n] = ps_{m+n}, and finally
    // annihilates the generating state.
    if s.dt.contains(&(-n)) {
        return Err(FockError::UnsupportedBracket(format!(
            "central term of [dt_{}, dt_{}] is not part of the mode table",
            n, -n
        )));
    }
    let mut out = LinComb::zero();
    for (j, &m) in s.ps.iter().enumerate() {
        // dt_n ps_m = ps_m dt_n - ps_{m+n}; the replacement continues in place
        let mut ps = s.ps.clone();
        ps.remove(j);
        if let Some((ps2, sign)) = ps_insert_from(&ps, m + n, j) {
            let mut st = s.clone();
            st.ps = ps2;
            out.add_term(st, int(-sign));
        }
    }
    Ok(out)
}

/// Insert a ps index into a sorted ps list, entering at slot `from` and
/// moving right; returns the new list and the fermionic sign, or None on
/// collision or annihilation (index >= 0 exits to the right and kills the
/// bare vacuum).
fn ps_insert_from(ps: &[i64], m: i64, from: usize) -> Option<(Vec<i64>, i64)> {
    let mut sign = 1i64;
    let mut pos = from;
    while pos < ps.len() && ps[pos] < m {
        sign = -sign;
        pos += 1;
    }
    if pos < ps.len() && ps[pos] == m {
        return None;
    }
    if m >= 0 {
        return None; // annihilates after passing everything
    }
    let mut out = ps.to_vec();
    out.insert(pos, m);
    Some((out, sign))
}

fn apply_ph(n: i64, s: &FockState) -> LinComb {
    if n <= 0 {
        // park inside the ph block; jumps over earlier (smaller) entries
        let pos = s.ph.partition_point(|&e| e < n);
        if pos < s.ph.len() && s.ph[pos] == n {
            return LinComb::zero();
        }
        let sign = if pos % 2 == 0 { 1 } else { -1 };
        let mut out = s.clone();
        out.ph.insert(pos, n);
        return LinComb::single(out, int(sign));
    }
    // positive index: anticommutes through the whole ph block, then pairs
    // against ps_{-n} if present, otherwise annihilates the bare vacuum.
    let base_sign = if s.ph.len() % 2 == 0 { 1 } else { -1 };
    match s.ps.binary_search(&(-n)) {
        Ok(j) => {
            let sign = base_sign * if j % 2 == 0 { 1 } else { -1 };
            let mut out = s.clone();
            out.ps.remove(j);
            LinComb::single(out, int(sign))
        }
        Err(_) => LinComb::zero(),
    }
}

fn apply_ps(n: i64, s: &FockState) -> LinComb {
    let mut out = LinComb::zero();
    // phase 1: branch over dt entries consumed via [ps_m, dt_j] = ps_{m+j}
    // (processing dt left to right; each consumed entry shifts the index).
    // branches: (index, dt entries kept so far as mask)
    let mut branches: Vec<(i64, Vec<i64>, i64)> = vec![(n, Vec::new(), 1)];
    for &d in &s.dt {
        let mut next = Vec::with_capacity(branches.len() * 2);
        for (m, kept, coeff) in branches {
            let mut kept_keep = kept.clone();
            kept_keep.push(d);
            next.push((m, kept_keep, coeff)); // pass over
            next.push((m + d, kept, coeff)); // consume the dt mode
        }
        branches = next;
    }
    for (m, dt_left, coeff) in branches {
        // phase 2: walk the ph block; delta terms pair ph_i with index -i
        let mut sign = 1i64;
        for (i, &p) in s.ph.iter().enumerate() {
            if p + m == 0 {
                let mut st = s.clone();
                st.dt = dt_left.clone();
                st.ph.remove(i);
                out.add_term(st, int(coeff * sign));
            }
            sign = -sign;
        }
        // phase 3: park in the ps block (or annihilate)
        if let Some((ps2, s2)) = ps_insert_from(&s.ps, m, 0) {
            let mut st = s.clone();
            st.dt = dt_left;
            st.ps = ps2;
            out.add_term(st, int(coeff * sign * s2));
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Current-algebra modes, spectral flow, and the affine sl2 bracket.
// ---------------------------------------------------------------------------

/// Modes of the affine sl2 currents, the lattice Heisenberg pair, lattice
/// exponentials, and the two Virasoro fields, used to state the spectral
/// flow action exactly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum CurrentMode {
    E(i64),
    H(i64),
    F(i64),
    /// Virasoro modes of the affine sl2 side.
    TSl2(i64),
    /// Heisenberg modes of the half-lattice vertex algebra.
    C(i64),
    D(i64),
    /// Lattice exponential with exponent `n_exp`, at the given mode index.
    ENc { n_exp: i64, index: i64 },
    /// Virasoro modes of the half-lattice vertex algebra.
    TPi(i64),
}

/// A finite combination of current modes plus a central (unit) part.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CurrentComb {
    pub modes: BTreeMap<CurrentMode, Rational>,
    pub unit: Rational,
}

impl CurrentComb {
    pub fn zero() -> Self {
        CurrentComb::default()
    }

    pub fn mode(m: CurrentMode) -> Self {
        let mut c = CurrentComb::zero();
        c.modes.insert(m, Rational::one());
        c
    }

    pub fn add_mode(&mut self, m: CurrentMode, coeff: Rational) {
        if coeff.is_zero() {
            return;
        }
        let slot = self.modes.entry(m).or_insert_with(Rational::zero);
        *slot += coeff;
        if slot.is_zero() {
            self.modes.remove(&m);
        }
    }

    pub fn add_unit(&mut self, coeff: Rational) {
        self.unit += coeff;
    }

    pub fn add(&mut self, other: &CurrentComb) {
        for (m, c) in &other.modes {
            self.add_mode(*m, c.clone());
        }
        self.unit += other.unit.clone();
    }

    pub fn scale(&mut self, c: &Rational) {
        for v in self.modes.values_mut() {
            *v *= c.clone();
        }
        self.unit *= c.clone();
        self.modes.retain(|_, v| !v.is_zero());
    }

    pub fn is_zero(&self) -> bool {
        self.modes.is_empty() && self.unit.is_zero()
    }
}

/// The spectral flow automorphism by `ell` applied to a single mode at
/// level `k` (exact rational central shifts).
pub fn flow_map(ell: i64, x: CurrentMode, k: &Rational) -> CurrentComb {
    use CurrentMode::*;
    let mut out = CurrentComb::zero();
    let delta0 = |n: i64| n == 0;
    match x {
        E(n) => out.add_mode(E(n - ell), Rational::one()),
        F(n) => out.add_mode(F(n + ell), Rational::one()),
        H(n) => {
            out.add_mode(H(n), Rational::one());
            if delta0(n) {
                out.add_unit(-int(ell) * k.clone());
            }
        }
        TSl2(n) => {
            out.add_mode(TSl2(n), Rational::one());
            out.add_mode(H(n), -int(ell) / int(2));
            if delta0(n) {
                out.add_unit(k.clone() / int(4) * int(ell * ell));
            }
        }
        D(n) => {
            out.add_mode(D(n), Rational::one());
            if delta0(n) {
                out.add_unit(-k.clone() / int(2) * int(ell));
            }
        }
        C(n) => {
            out.add_mode(C(n), Rational::one());
            if delta0(n) {
                out.add_unit(-int(ell));
            }
        }
        ENc { n_exp, index } => out.add_mode(ENc { n_exp, index: index - ell * n_exp }, Rational::one()),
        TPi(n) => {
            // the Heisenberg weight field b = (k/4) c + (1/2) d
            out.add_mode(TPi(n), Rational::one());
            out.add_mode(C(n), -int(ell) * k.clone() / int(4));
            out.add_mode(D(n), -int(ell) / int(2));
            if delta0(n) {
                out.add_unit(k.clone() / int(4) * int(ell * ell));
            }
        }
    }
    out
}

/// Apply the flow automorphism termwise to a combination (the unit part is
/// fixed).
pub fn flow_map_comb(ell: i64, x: &CurrentComb, k: &Rational) -> CurrentComb {
    let mut out = CurrentComb::zero();
    out.add_unit(x.unit.clone());
    for (m, c) in &x.modes {
        let mut piece = flow_map(ell, *m, k);
        piece.scale(c);
        out.add(&piece);
    }
    out
}

/// The affine sl2 bracket of two current modes at level `k`:
/// `[x_m, y_n] = [x,y]_{m+n} + m kappa(x,y) delta_{m+n,0} k`.
/// Only defined for the sl2 modes e, h, f.
pub fn sl2hat_bracket(x: CurrentMode, y: CurrentMode, k: &Rational) -> Result<CurrentComb, FockError> {
    use CurrentMode::*;
    let (xm, yn) = (x, y);
    let (xi, xn) = match xm {
        E(n) => (0, n),
        H(n) => (1, n),
        F(n) => (2, n),
        other => return Err(FockError::UnsupportedMode(format!("{other:?} is not an sl2 mode"))),
    };
    let (yi, ynn) = match yn {
        E(n) => (0, n),
        H(n) => (1, n),
        F(n) => (2, n),
        other => return Err(FockError::UnsupportedMode(format!("{other:?} is not an sl2 mode"))),
    };
    let total = xn + ynn;
    let mut out = CurrentComb::zero();
    // structure constants: [h,e] = 2e, [e,f] = h, [h,f] = -2f
    let lie: Option<(CurrentMode, i64)> = match (xi, yi) {
        (1, 0) => Some((E(total), 2)),
        (0, 1) => Some((E(total), -2)),
        (0, 2) => Some((H(total), 1)),
        (2, 0) => Some((H(total), -1)),
        (1, 2) => Some((F(total), -2)),
        (2, 1) => Some((F(total), 2)),
        _ => None,
    };
    if let Some((m, c)) = lie {
        out.add_mode(m, int(c));
    }
    // invariant form: kappa(h,h) = 2, kappa(e,f) = kappa(f,e) = 1
    let kappa: i64 = match (xi, yi) {
        (1, 1) => 2,
        (0, 2) | (2, 0) => 1,
        _ => 0,
    };
    if kappa != 0 && total == 0 {
        out.add_unit(int(xn) * int(kappa) * k.clone());
    }
    Ok(out)
}

/// Bilinear extension of the sl2 bracket to combinations; unit parts are
/// central and drop out.
pub fn sl2hat_bracket_comb(x: &CurrentComb, y: &CurrentComb, k: &Rational) -> Result<CurrentComb, FockError> {
    let mut out = CurrentComb::zero();
    for (xm, xc) in &x.modes {
        for (ym, yc) in &y.modes {
            let mut piece = sl2hat_bracket(*xm, *ym, k)?;
            piece.scale(&(xc.clone() * yc.clone()));
            out.add(&piece);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one() -> Rational {
        Rational::one()
    }

    #[test]
    fn canonical_word_round_trips_with_unit_coefficient() {
        let s = FockState::with_modes(0, 2, vec![-3, -1, -1], vec![-2], vec![-1, 0], vec![-4, -2]).unwrap();
        let lin = normal_order(&s.word(), &FockState::vacuum(0, 2)).unwrap();
        assert_eq!(lin.len(), 1);
        assert_eq!(lin.coeff(&s), one());
    }

    #[test]
    fn ec_annihilates_raises_and_creates() {
        // flow 0: ec_0 is the raiser, positive indices annihilate
        let v = FockState::vacuum(0, 0);
        let raised = normal_order(&[ModeOp::ec(0)], &v).unwrap();
        assert_eq!(raised.coeff(&FockState::vacuum(0, 1)), one());
        assert!(normal_order(&[ModeOp::ec(1)], &v).unwrap().is_zero());
        let created = normal_order(&[ModeOp::ec(-2)], &v).unwrap();
        let expect = FockState::with_modes(0, 0, vec![], vec![-2], vec![], vec![]).unwrap();
        assert_eq!(created.coeff(&expect), one());
        // flow -2: ec_1 creates, ec_2 raises, ec_3 annihilates
        let v2 = FockState::vacuum(-2, 0);
        let c = normal_order(&[ModeOp::ec(1)], &v2).unwrap();
        let expect2 = FockState::with_modes(-2, 0, vec![], vec![1], vec![], vec![]).unwrap();
        assert_eq!(c.coeff(&expect2), one());
        assert_eq!(
            normal_order(&[ModeOp::ec(2)], &v2).unwrap().coeff(&FockState::vacuum(-2, 1)),
            one()
        );
        assert!(normal_order(&[ModeOp::ec(3)], &v2).unwrap().is_zero());
    }

    #[test]
    fn ps_past_dt_produces_the_reordering_term() {
        // ps_{-1} dt_{-1} |0> = dt_{-1} ps_{-1} |0> + ps_{-2} |0>
        let v = FockState::vacuum(0, 0);
        let lin = normal_order(&[ModeOp::ps(-1), ModeOp::dt(-1)], &v).unwrap();
        let a = FockState::with_modes(0, 0, vec![-1], vec![], vec![], vec![-1]).unwrap();
        let b = FockState::with_modes(0, 0, vec![], vec![], vec![], vec![-2]).unwrap();
        assert_eq!(lin.len(), 2);
        assert_eq!(lin.coeff(&a), one());
        assert_eq!(lin.coeff(&b), one());
    }

    #[test]
    fn ph_annihilates_against_dressing() {
        // flow -2 dressed vacuum has ps = {-2,-1}; ph_1 removes the -1 entry
        let dressed = FockState::with_modes(-2, 0, vec![], vec![], vec![], vec![-2, -1]).unwrap();
        let lin = normal_order(&[ModeOp::ph(1)], &dressed).unwrap();
        let expect = FockState::with_modes(-2, 0, vec![], vec![], vec![], vec![-2]).unwrap();
        assert_eq!(lin.len(), 1);
        // jumps the ps entry at -2: one transposition
        assert_eq!(lin.coeff(&expect), -one());
    }

    #[test]
    fn ph_positive_annihilates_bare_vacuum() {
        let v = FockState::vacuum(0, 0);
        assert!(normal_order(&[ModeOp::ph(1)], &v).unwrap().is_zero());
        assert!(normal_order(&[ModeOp::ps(0)], &v).unwrap().is_zero());
    }

    #[test]
    fn fermion_nilpotence() {
        let v = FockState::vacuum(0, 0);
        assert!(normal_order(&[ModeOp::ph(0), ModeOp::ph(0)], &v).unwrap().is_zero());
        assert!(normal_order(&[ModeOp::ps(-1), ModeOp::ps(-1)], &v).unwrap().is_zero());
    }

    #[test]
    fn fermion_anticommutation_signs() {
        // ph_0 ph_{-1} = - ph_{-1} ph_0 as canonical monomials
        let v = FockState::vacuum(0, 0);
        let a = normal_order(&[ModeOp::ph(0), ModeOp::ph(-1)], &v).unwrap();
        let b = normal_order(&[ModeOp::ph(-1), ModeOp::ph(0)], &v).unwrap();
        let canon = FockState::with_modes(0, 0, vec![], vec![], vec![-1, 0], vec![]).unwrap();
        assert_eq!(a.coeff(&canon), -one());
        assert_eq!(b.coeff(&canon), one());
    }

    #[test]
    fn delta_pairing_fires_through_the_block() {
        // ps_{-1} applied to a state with ph = {1 paired?} -- pair ps_m with ph_{-m}
        let s = FockState::with_modes(0, 0, vec![], vec![], vec![-1, 0], vec![]).unwrap();
        let lin = apply_ps(1, &s);
        // delta against ph_{-1} (position 0): coefficient +1, ph_0 remains
        let expect = FockState::with_modes(0, 0, vec![], vec![], vec![0], vec![]).unwrap();
        assert_eq!(lin.coeff(&expect), one());
    }

    #[test]
    fn dt_zero_and_central_bracket_error() {
        let v = FockState::vacuum(0, 0);
        assert!(matches!(
            normal_order(&[ModeOp::dt(0)], &v),
            Err(FockError::UnsupportedBracket(_))
        ));
        let s = FockState::with_modes(0, 0, vec![-2], vec![], vec![], vec![]).unwrap();
        assert!(matches!(
            normal_order(&[ModeOp::dt(2)], &s),
            Err(FockError::UnsupportedBracket(_))
        ));
    }

    #[test]
    fn dt_positive_acts_on_ps_block() {
        // dt_1 ps_{-2} |0> = -ps_{-1} |0>
        let s = FockState::with_modes(0, 0, vec![], vec![], vec![], vec![-2]).unwrap();
        let lin = normal_order(&[ModeOp::dt(1)], &s).unwrap();
        let expect = FockState::with_modes(0, 0, vec![], vec![], vec![], vec![-1]).unwrap();
        assert_eq!(lin.len(), 1);
        assert_eq!(lin.coeff(&expect), -one());
    }

    #[test]
    fn grade_and_ghost_examples() {
        let s = FockState::with_modes(0, 3, vec![-2], vec![], vec![], vec![-1]).unwrap();
        assert_eq!(s.grade(), 3);
        assert_eq!(s.ghost(), 1);
        let v = FockState::vacuum(-2, 1);
        assert_eq!(v.grade(), -2);
        let dressed = FockState::with_modes(-2, 0, vec![], vec![], vec![], vec![-2, -1]).unwrap();
        assert_eq!(dressed.ghost(), 2);
        assert_eq!(dressed.grade(), 3);
    }

    #[test]
    fn li_grade_examples() {
        let s = FockState::with_modes(0, 0, vec![-3, -1], vec![], vec![], vec![-2]).unwrap();
        // contributions: (3-1) + (1-1) + (2-1) = 3
        assert_eq!(s.li_grade().unwrap(), 3);
        let bad = FockState::with_modes(0, 0, vec![], vec![-1], vec![], vec![]).unwrap();
        assert!(bad.li_grade().is_err());
    }

    #[test]
    fn rendering_is_canonical() {
        let s = FockState::with_modes(-2, 1, vec![-2, -1], vec![], vec![0], vec![-3]).unwrap();
        assert_eq!(s.render(), "dt[-2,-1] ec[] ph[0] ps[-3] mu+1 flow-2");
    }

    #[test]
    fn normal_order_is_idempotent_on_random_words() {
        // applying the canonical word of each output state reproduces it
        let v = FockState::vacuum(1, 0);
        let word = [ModeOp::ps(-2), ModeOp::ph(-1), ModeOp::dt(-1), ModeOp::ph(0)];
        let lin = normal_order(&word, &v).unwrap();
        for (s, _) in lin.iter() {
            let again = normal_order(&s.word(), &FockState::vacuum(s.flow(), s.mu_offset)).unwrap();
            assert_eq!(again.len(), 1);
            assert_eq!(again.coeff(s), one());
        }
    }

    #[test]
    fn flow_map_is_a_bracket_homomorphism() {
        use CurrentMode::*;
        let k = crate::exactlin::rat(-1, 2); // generic-looking level
        for ell in -3i64..=3 {
            for m in -4i64..=4 {
                for n in -4i64..=4 {
                    for (x, y) in [
                        (E(m), F(n)),
                        (H(m), E(n)),
                        (H(m), F(n)),
                        (H(m), H(n)),
                        (E(m), E(n)),
                        (F(m), F(n)),
                    ] {
                        let lhs = flow_map_comb(ell, &sl2hat_bracket(x, y, &k).unwrap(), &k);
                        let rhs =
                            sl2hat_bracket_comb(&flow_map(ell, x, &k), &flow_map(ell, y, &k), &k).unwrap();
                        assert_eq!(lhs, rhs, "ell={ell} x={x:?} y={y:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn flow_map_inverts() {
        use CurrentMode::*;
        let k = crate::exactlin::rat(3, 4);
        for ell in -3i64..=3 {
            for x in [E(2), H(0), F(-1), TSl2(0), C(0), D(0), TPi(0), ENc { n_exp: 2, index: 1 }] {
                let there = flow_map(ell, x, &k);
                let back = flow_map_comb(-ell, &there, &k);
                assert_eq!(back, CurrentComb::mode(x), "ell={ell} x={x:?}");
            }
        }
    }

    #[test]
    fn flow_of_virasoro_mode_has_the_level_shift() {
        use CurrentMode::*;
        let k = crate::exactlin::rat(-1, 2);
        let flowed = flow_map(2, TSl2(0), &k);
        assert_eq!(flowed.modes.get(&TSl2(0)), Some(&Rational::one()));
        assert_eq!(flowed.modes.get(&H(0)), Some(&crate::exactlin::rat(-1, 1)));
        assert_eq!(flowed.unit, crate::exactlin::rat(-1, 2)); // (k/4) ell^2 = (-1/2)
    }
}
