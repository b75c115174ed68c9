//! Spectral sequences of filtered finite complexes, computed exactly from
//! explicit cycle/boundary subspaces, plus the mode-weight filtration on the
//! boson/antighost sector that collapses on the first page.
//!
//! Conventions: the filtration is decreasing (F^p ⊇ F^{p+1}) and the
//! differential raises the total degree by one without lowering the
//! filtration degree.  Pages are indexed by (p, q) with q = n - p.

use crate::brst::differential_commutator;
use crate::combinatorics::{enumerate_fermionic, enumerate_partitions};
use crate::exactlin::{Rational, SparseMatrix};
use crate::fock::{FockError, FockState, LinComb};
use num::{One, Zero};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SpecSeqError {
    #[error("filtration violated: {0}")]
    FiltrationViolated(String),
    #[error("degree {0} has inconsistent dimensions")]
    ShapeMismatch(i64),
    #[error(transparent)]
    Fock(#[from] FockError),
}

/// A finite cochain complex with a basis-diagonal decreasing filtration:
/// every basis vector carries a filtration degree, and F^p in each total
/// degree is spanned by the basis vectors of filtration >= p.
#[derive(Debug, Clone)]
pub struct FilteredComplex {
    /// total degree -> printable basis labels
    pub labels: BTreeMap<i64, Vec<String>>,
    /// total degree -> filtration degree of each basis vector
    pub filt: BTreeMap<i64, Vec<i64>>,
    /// total degree n -> matrix of d: C^n -> C^{n+1}
    pub d: BTreeMap<i64, SparseMatrix>,
}

impl FilteredComplex {
    pub fn dim(&self, n: i64) -> usize {
        self.labels.get(&n).map_or(0, |v| v.len())
    }

    pub fn d_at(&self, n: i64) -> SparseMatrix {
        match self.d.get(&n) {
            Some(m) => m.clone(),
            None => SparseMatrix::zero(self.dim(n + 1), self.dim(n)),
        }
    }

    pub fn min_filt(&self) -> i64 {
        self.filt.values().flatten().copied().min().unwrap_or(0)
    }

    pub fn max_filt(&self) -> i64 {
        self.filt.values().flatten().copied().max().unwrap_or(0)
    }

    /// Shape consistency plus the filtration-compatibility of d: an entry
    /// mapping a vector of filtration p onto one of filtration < p is an
    /// error, reported with the offending basis labels.
    pub fn validate(&self) -> Result<(), SpecSeqError> {
        for (&n, labels) in &self.labels {
            if self.filt.get(&n).map_or(0, |f| f.len()) != labels.len() {
                return Err(SpecSeqError::ShapeMismatch(n));
            }
        }
        for (&n, m) in &self.d {
            if m.cols() != self.dim(n) || m.rows() != self.dim(n + 1) {
                return Err(SpecSeqError::ShapeMismatch(n));
            }
            let src = &self.filt[&n];
            let empty = Vec::new();
            let dst = self.filt.get(&(n + 1)).unwrap_or(&empty);
            for (i, j, _) in m.iter() {
                if dst[i] < src[j] {
                    return Err(SpecSeqError::FiltrationViolated(format!(
                        "d({}) has a component on {} of lower filtration ({} < {})",
                        self.labels[&n][j],
                        self.labels[&(n + 1)][i],
                        dst[i],
                        src[j],
                    )));
                }
            }
        }
        Ok(())
    }

    /// Cohomology dimension at total degree n, computed directly.
    pub fn h_dim(&self, n: i64) -> usize {
        let d_out = self.d_at(n);
        let d_in = self.d_at(n - 1);
        self.dim(n) - d_out.rank() - d_in.rank()
    }

    /// A spanning set (as ambient column vectors in degree n) for
    /// Z_r^p = { x in F^p C^n : d x in F^{p+r} }.  For r large this is the
    /// space of cocycles in F^p; r = 0 gives all of F^p.
    fn z_space(&self, p: i64, n: i64, r: i64) -> Vec<Vec<Rational>> {
        let dim_n = self.dim(n);
        if dim_n == 0 {
            return Vec::new();
        }
        let filt_n = &self.filt[&n];
        let cols: Vec<usize> = (0..dim_n).filter(|&j| filt_n[j] >= p).collect();
        if cols.is_empty() {
            return Vec::new();
        }
        let d = self.d_at(n);
        let empty = Vec::new();
        let filt_next = self.filt.get(&(n + 1)).unwrap_or(&empty);
        let rows: Vec<usize> = (0..d.rows()).filter(|&i| filt_next[i] < p + r).collect();
        // kernel of the (rows x cols) submatrix, embedded back into C^n
        let row_pos: BTreeMap<usize, usize> = rows.iter().enumerate().map(|(a, &i)| (i, a)).collect();
        let col_pos: BTreeMap<usize, usize> = cols.iter().enumerate().map(|(a, &j)| (j, a)).collect();
        let mut triplets = Vec::new();
        for (i, j, v) in d.iter() {
            if let (Some(&ri), Some(&cj)) = (row_pos.get(&i), col_pos.get(&j)) {
                triplets.push((ri, cj, v.clone()));
            }
        }
        let sub = SparseMatrix::from_triplets(rows.len(), cols.len(), triplets).unwrap();
        sub.kernel_basis()
            .into_iter()
            .map(|k| {
                let mut v = vec![Rational::zero(); dim_n];
                for (a, &j) in cols.iter().enumerate() {
                    v[j] = k[a].clone();
                }
                v
            })
            .collect()
    }
}

/// Incremental exact rank tracker over ambient column vectors.
struct SpanBuilder {
    dim: usize,
    /// reduced rows: (pivot index, vector with 1 at the pivot)
    rows: Vec<(usize, Vec<Rational>)>,
}

impl SpanBuilder {
    fn new(dim: usize) -> Self {
        SpanBuilder { dim, rows: Vec::new() }
    }

    fn reduce(&self, v: &mut [Rational]) {
        for (p, row) in &self.rows {
            if !v[*p].is_zero() {
                let f = v[*p].clone();
                for j in 0..self.dim {
                    let delta = &f * &row[j];
                    v[j] = &v[j] - &delta;
                }
            }
        }
    }

    /// Add a vector; returns true if it enlarged the span.
    fn try_add(&mut self, v: &[Rational]) -> bool {
        let mut w = v.to_vec();
        self.reduce(&mut w);
        match w.iter().position(|x| !x.is_zero()) {
            None => false,
            Some(p) => {
                let inv = Rational::one() / w[p].clone();
                for x in w.iter_mut() {
                    *x = &*x * &inv;
                }
                self.rows.push((p, w));
                true
            }
        }
    }

}

/// One page of the spectral sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Page {
    pub r: i64,
    /// (p, q) -> dim E_r^{p,q}; zero entries omitted
    pub dims: BTreeMap<(i64, i64), usize>,
    /// (p, q) -> matrix of d_r: E_r^{p,q} -> E_r^{p+r, q-r+1}; entries
    /// present only where both source and target are nonzero
    pub differentials: BTreeMap<(i64, i64), SparseMatrix>,
}

impl Page {
    pub fn dim(&self, p: i64, q: i64) -> usize {
        self.dims.get(&(p, q)).copied().unwrap_or(0)
    }

    pub fn total(&self) -> usize {
        self.dims.values().sum()
    }

    pub fn all_differentials_zero(&self) -> bool {
        self.differentials.values().all(|m| m.is_zero())
    }
}

/// Explicit quotient presentation of E_r^{p, n}: representative vectors in
/// ambient degree-n coordinates on top of a spanning set of the denominator.
struct Subquotient {
    /// spanning set of Z_{r-1}^{p+1} + d Z_{r-1}^{p-r+1} (the part killed
    /// in the quotient)
    denominator: Vec<Vec<Rational>>,
    /// independent representatives completing the denominator inside Z_r^p
    reps: Vec<Vec<Rational>>,
}

fn subquotient(fc: &FilteredComplex, p: i64, n: i64, r: i64) -> Subquotient {
    let z_top = fc.z_space(p, n, r);
    let mut denominator = fc.z_space(p + 1, n, r - 1);
    let d_prev = fc.d_at(n - 1);
    for z in fc.z_space(p - r + 1, n - 1, r - 1) {
        let img = d_prev.apply(&z);
        if img.iter().any(|x| !x.is_zero()) {
            denominator.push(img);
        }
    }
    let dim_n = fc.dim(n);
    let mut span = SpanBuilder::new(dim_n.max(1));
    for v in &denominator {
        span.try_add(v);
    }
    let mut reps = Vec::new();
    for v in z_top {
        if span.try_add(&v) {
            reps.push(v);
        }
    }
    Subquotient { denominator, reps }
}

/// Compute page r (r >= 0) of the spectral sequence, with its
/// differentials expressed in the chosen representative bases.
pub fn page(fc: &FilteredComplex, r: i64) -> Result<Page, SpecSeqError> {
    fc.validate()?;
    assert!(r >= 0, "page index must be non-negative");
    let p_lo = fc.min_filt();
    let p_hi = fc.max_filt();
    let degrees: Vec<i64> = fc.labels.keys().copied().collect();
    let mut quotients: BTreeMap<(i64, i64), Subquotient> = BTreeMap::new();
    let mut dims = BTreeMap::new();
    for &n in &degrees {
        for p in p_lo..=p_hi {
            let sq = subquotient(fc, p, n, r);
            if !sq.reps.is_empty() {
                dims.insert((p, n - p), sq.reps.len());
            }
            quotients.insert((p, n), sq);
        }
    }
    // d_r on representatives: d x lands in Z_r^{p+r, n+1}; express it in
    // the representative basis there modulo the denominator.
    let mut differentials = BTreeMap::new();
    for (&(p, n), sq) in &quotients {
        if sq.reps.is_empty() {
            continue;
        }
        let target = match quotients.get(&(p + r, n + 1)) {
            Some(t) => t,
            None => continue,
        };
        let d = fc.d_at(n);
        let dim_next = fc.dim(n + 1);
        let mut spanning: Vec<Vec<Rational>> = target.denominator.clone();
        let denom_count = spanning.len();
        spanning.extend(target.reps.iter().cloned());
        let solve_m = SparseMatrix::from_columns(dim_next.max(1), &spanning);
        let mut triplets = Vec::new();
        for (j, x) in sq.reps.iter().enumerate() {
            let img = d.apply(x);
            if img.iter().all(|v| v.is_zero()) {
                continue;
            }
            let coords = solve_m.solve(&img).unwrap_or_else(|| {
                panic!("d_r image escaped the target subquotient at (p={p}, n={n})")
            });
            for (i, c) in coords[denom_count..].iter().enumerate() {
                if !c.is_zero() {
                    triplets.push((i, j, c.clone()));
                }
            }
        }
        if target.reps.is_empty() && triplets.is_empty() {
            continue;
        }
        let m = SparseMatrix::from_triplets(target.reps.len(), sq.reps.len(), triplets).unwrap();
        differentials.insert((p, n - p), m);
    }
    Ok(Page { r, dims, differentials })
}

/// Collapse detection: the smallest r such that pages r..=bound carry no
/// nonzero differential and constant dimensions, together with the limit
/// page.  The bound (filtration spread + 1) suffices for a basis-diagonal
/// filtration on a finite complex.
#[derive(Debug, Clone)]
pub struct Collapse {
    pub collapse_at: i64,
    pub limit: Page,
}

pub fn detect_collapse(fc: &FilteredComplex) -> Result<Collapse, SpecSeqError> {
    let bound = (fc.max_filt() - fc.min_filt() + 1).max(1);
    let pages: Vec<Page> = (0..=bound).map(|r| page(fc, r)).collect::<Result<_, _>>()?;
    let limit = pages.last().unwrap().clone();
    let mut collapse_at = bound;
    for r in (0..bound).rev() {
        if pages[r as usize].all_differentials_zero() && pages[r as usize].dims == limit.dims {
            collapse_at = r;
        } else {
            break;
        }
    }
    Ok(Collapse { collapse_at, limit })
}

/// Convergence audit for a basis-diagonal filtration of a finite complex.
#[derive(Debug, Clone)]
pub struct ConvergenceAudit {
    /// per total degree: sum over p of dim E_inf^{p, n-p} equals dim H^n
    pub limit_matches_cohomology: bool,
    /// the filtration is exhaustive and Hausdorff on the enumerated basis:
    /// every degree has a finite maximal filtration and attains its minimum
    pub exhaustive_and_hausdorff: bool,
    /// filtration degrees are non-negative (bounded below uniformly)
    pub filtration_bounded: bool,
    pub h_dims: BTreeMap<i64, usize>,
    pub e_inf_dims: BTreeMap<i64, usize>,
}

impl ConvergenceAudit {
    pub fn passed(&self) -> bool {
        self.limit_matches_cohomology && self.exhaustive_and_hausdorff && self.filtration_bounded
    }
}

/// Audit convergence: compare the limit page against directly computed
/// cohomology in every total degree, and check the boundedness conditions
/// that make the convergence automatic on the enumerated basis.
pub fn convergence_audit(fc: &FilteredComplex) -> Result<ConvergenceAudit, SpecSeqError> {
    let collapse = detect_collapse(fc)?;
    let mut e_inf_dims: BTreeMap<i64, usize> = BTreeMap::new();
    for (&(p, q), &d) in &collapse.limit.dims {
        *e_inf_dims.entry(p + q).or_insert(0) += d;
    }
    let mut h_dims = BTreeMap::new();
    for &n in fc.labels.keys() {
        let h = fc.h_dim(n);
        if h > 0 {
            h_dims.insert(n, h);
        }
    }
    let limit_matches_cohomology = h_dims == e_inf_dims;
    // every basis vector carries a finite filtration degree by
    // construction; each nonempty degree must attain finite extrema
    let exhaustive_and_hausdorff = fc
        .labels
        .iter()
        .all(|(n, basis)| basis.is_empty() || fc.filt.get(n).map_or(false, |f| f.len() == basis.len()));
    let filtration_bounded = fc.filt.values().flatten().all(|&f| f >= 0);
    Ok(ConvergenceAudit {
        limit_matches_cohomology,
        exhaustive_and_hausdorff,
        filtration_bounded,
        h_dims,
        e_inf_dims,
    })
}

/// The finite shadow of conformal boundedness: on every boson/antighost
/// basis state up to the cutoff, the mode-weight filtration degree is at
/// most the conformal grade.
pub fn conformal_boundedness(max_grade: i64) -> bool {
    (0..=max_grade).all(|w| {
        boson_antighost_basis(w)
            .iter()
            .all(|s| li_filtration(s) >= 0 && li_filtration(s) <= s.grade())
    })
}

/// All boson/antighost states (dt and ps modes only, flow 0, mu 0) of the
/// given conformal grade, ordered by ghost number then canonically.
pub fn boson_antighost_basis(grade: i64) -> Vec<FockState> {
    let mut out = Vec::new();
    if grade < 0 {
        return out;
    }
    for dt_weight in 0..=grade as u64 {
        for dt_part in enumerate_partitions(dt_weight) {
            for ps_part in enumerate_fermionic(grade as u64 - dt_weight) {
                let dt: Vec<i64> = dt_part.parts().iter().map(|&p| -(p as i64)).collect();
                let ps: Vec<i64> = ps_part.parts().iter().map(|&p| -(p as i64)).collect();
                if ps_part.parts().iter().any(|&p| p == 0) {
                    continue; // ps_0 does not exist at flow 0
                }
                out.push(FockState::with_modes(0, 0, dt, vec![], vec![], ps).unwrap());
            }
        }
    }
    out.sort_by_key(|s| (s.ghost(), s.clone()));
    out
}

/// Build the filtered complex for the boson/antighost sector at one
/// conformal grade, filtration degree assigned per basis state by `filt_of`.
pub fn filtered_from_states<F>(states: &[FockState], filt_of: F) -> Result<FilteredComplex, SpecSeqError>
where
    F: Fn(&FockState) -> i64,
{
    let mut by_ghost: BTreeMap<i64, Vec<FockState>> = BTreeMap::new();
    for s in states {
        by_ghost.entry(s.ghost()).or_default().push(s.clone());
    }
    let mut labels = BTreeMap::new();
    let mut filt = BTreeMap::new();
    for (&n, basis) in &by_ghost {
        labels.insert(n, basis.iter().map(|s| s.render()).collect::<Vec<_>>());
        filt.insert(n, basis.iter().map(&filt_of).collect::<Vec<_>>());
    }
    let mut d = BTreeMap::new();
    for (&n, basis) in &by_ghost {
        let empty = Vec::new();
        let target = by_ghost.get(&(n + 1)).unwrap_or(&empty);
        let index: BTreeMap<&FockState, usize> = target.iter().enumerate().map(|(i, s)| (s, i)).collect();
        let mut triplets = Vec::new();
        for (j, s) in basis.iter().enumerate() {
            for (t, c) in differential_commutator(s)?.iter() {
                let i = *index
                    .get(t)
                    .unwrap_or_else(|| panic!("differential left the graded span at {}", t.render()));
                triplets.push((i, j, c.clone()));
            }
        }
        d.insert(n, SparseMatrix::from_triplets(target.len(), basis.len(), triplets).unwrap());
    }
    let fc = FilteredComplex { labels, filt, d };
    fc.validate()?;
    Ok(fc)
}

/// Mode-weight filtration degree of a boson/antighost state: each mode of
/// index -m contributes m - 1.  The differential never lowers it.
pub fn li_filtration(s: &FockState) -> i64 {
    s.li_grade().expect("boson/antighost state")
}

/// The one-grade filtered complex of the boson/antighost sector under the
/// mode-weight filtration.
pub fn c0_li_complex(grade: i64) -> Result<FilteredComplex, SpecSeqError> {
    filtered_from_states(&boson_antighost_basis(grade), li_filtration)
}

/// The same complex filtered by (grade minus) total mode count, so that the
/// mode-merging part of the differential strictly raises the degree.
pub fn c0_mode_count_complex(grade: i64) -> Result<FilteredComplex, SpecSeqError> {
    filtered_from_states(&boson_antighost_basis(grade), |s| {
        grade - (s.dt.len() + s.ps.len()) as i64
    })
}

/// First-page differential of the mode-weight filtration in closed form:
/// replace one boson mode by the antighost of the same index, in place,
/// with the sign of the fermion passage; terms whose antighost slot is
/// already occupied drop out.
pub fn e0_differential_closed_form(s: &FockState) -> Result<LinComb, FockError> {
    if !s.ec.is_empty() || !s.ph.is_empty() {
        return Err(FockError::InvalidState(
            "closed form applies to boson/antighost states only".into(),
        ));
    }
    let mut out = LinComb::zero();
    let mut seen: std::collections::BTreeSet<i64> = Default::default();
    for &a in &s.dt {
        if seen.contains(&a) {
            continue; // identical replacements merge; handle once with multiplicity
        }
        seen.insert(a);
        if s.ps.binary_search(&a).is_ok() {
            continue;
        }
        let mult = s.dt.iter().filter(|&&b| b == a).count() as i64;
        let mut dt = s.dt.clone();
        let pos = dt.iter().position(|&b| b == a).unwrap();
        dt.remove(pos);
        let mut ps = s.ps.clone();
        let insert_at = ps.iter().filter(|&&b| b < a).count();
        let sign = if insert_at % 2 == 0 { 1 } else { -1 };
        ps.insert(insert_at, a);
        let t = FockState::with_modes(s.flow(), s.mu_offset, dt, vec![], vec![], ps)?;
        out.add_term(t, crate::exactlin::rat(sign * mult, 1));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlin::rat;

    fn two_step_toy() -> FilteredComplex {
        // 0 -> C^0 -> C^1 -> 0 with one acyclic pair split across
        // filtration steps: d(x) = y where filt(x) = 0, filt(y) = 1,
        // plus a surviving class z in degree 0 at filtration 1.
        let mut labels = BTreeMap::new();
        labels.insert(0, vec!["x".to_string(), "z".to_string()]);
        labels.insert(1, vec!["y".to_string()]);
        let mut filt = BTreeMap::new();
        filt.insert(0, vec![0, 1]);
        filt.insert(1, vec![1]);
        let mut d = BTreeMap::new();
        d.insert(0, SparseMatrix::from_triplets(1, 2, vec![(0, 0, rat(1, 1))]).unwrap());
        FilteredComplex { labels, filt, d }
    }

    #[test]
    fn toy_pages_and_collapse() {
        let fc = two_step_toy();
        let p0 = page(&fc, 0).unwrap();
        // the pair straddles the filtration step, so E_0 sees all three
        assert_eq!(p0.total(), 3);
        assert!(p0.all_differentials_zero());
        let p1 = page(&fc, 1).unwrap();
        // d_1 cancels the pair, leaving z
        assert_eq!(p1.dim(0, 0), 1);
        assert!(!p1.all_differentials_zero());
        let p2 = page(&fc, 2).unwrap();
        assert_eq!(p2.total(), 1);
        assert_eq!(p2.dim(1, -1), 1);
        let c = detect_collapse(&fc).unwrap();
        assert_eq!(c.collapse_at, 2);
        assert_eq!(c.limit.total(), 1);
    }

    #[test]
    fn wrong_filtration_is_rejected() {
        let mut fc = two_step_toy();
        // flip the filtration so d lowers it: x at 1, y at 0
        fc.filt.insert(0, vec![1, 1]);
        fc.filt.insert(1, vec![0]);
        let err = fc.validate().unwrap_err();
        assert!(matches!(err, SpecSeqError::FiltrationViolated(_)), "{err}");
        assert!(page(&fc, 0).is_err());
    }

    #[test]
    fn boson_antighost_counts() {
        // grade 0: vacuum only; grade 1: dt_{-1}, ps_{-1}
        assert_eq!(boson_antighost_basis(0).len(), 1);
        assert_eq!(boson_antighost_basis(1).len(), 2);
        // grade 3: dt partitions {3},{21},{111} ; mixed ; ps {3},{21}
        let b3 = boson_antighost_basis(3);
        assert_eq!(b3.len(), 8);
    }

    #[test]
    fn mode_weight_filtration_collapses_on_page_one() {
        for grade in 0..=6 {
            let fc = c0_li_complex(grade).unwrap();
            let c = detect_collapse(&fc).unwrap();
            assert!(c.collapse_at <= 1, "grade {grade} collapses at {}", c.collapse_at);
            let expected = if grade == 0 { 1 } else { 0 };
            assert_eq!(c.limit.total(), expected, "grade {grade}");
            if grade == 0 {
                assert_eq!(c.limit.dim(0, 0), 1);
            }
        }
    }

    #[test]
    fn e0_closed_form_matches_page_zero_matrix() {
        for grade in 1..=5 {
            let states = boson_antighost_basis(grade);
            let fc = filtered_from_states(&states, li_filtration).unwrap();
            let p0 = page(&fc, 0).unwrap();
            // the degree-preserving part of d is exactly the closed form:
            // check that d minus the closed-form part strictly raises the
            // filtration on every state
            for s in &states {
                let full = differential_commutator(s).unwrap();
                let e0 = e0_differential_closed_form(s).unwrap();
                let mut residual = full.clone();
                let mut neg = e0.clone();
                neg.scale(&rat(-1, 1));
                residual.add(&neg);
                for (t, _) in e0.iter() {
                    assert_eq!(li_filtration(t), li_filtration(s), "{}", s.render());
                }
                for (t, _) in residual.iter() {
                    assert!(li_filtration(t) > li_filtration(s), "{}", s.render());
                }
            }
            let _ = p0;
        }
    }

    #[test]
    fn audit_passes_on_mode_weight_filtration() {
        for grade in 0..=6 {
            let fc = c0_li_complex(grade).unwrap();
            let audit = convergence_audit(&fc).unwrap();
            assert!(audit.passed(), "grade {grade}: {audit:?}");
        }
        assert!(conformal_boundedness(8));
    }

    #[test]
    fn mode_count_filtration_also_collapses_to_delta() {
        for grade in 0..=4 {
            let fc = c0_mode_count_complex(grade).unwrap();
            let p1 = page(&fc, 1).unwrap();
            let expected = if grade == 0 { 1 } else { 0 };
            assert_eq!(p1.total(), expected, "grade {grade}");
            let audit = convergence_audit(&fc).unwrap();
            assert!(audit.passed(), "grade {grade}");
        }
    }

    #[test]
    fn page_dims_non_increasing_in_r() {
        for grade in 0..=5 {
            let fc = c0_li_complex(grade).unwrap();
            let bound = (fc.max_filt() - fc.min_filt() + 1).max(1);
            let mut prev = page(&fc, 0).unwrap();
            for r in 1..=bound {
                let cur = page(&fc, r).unwrap();
                for (&k, &d) in &cur.dims {
                    assert!(d <= prev.dim(k.0, k.1), "grade {grade} page {r} at {k:?}");
                }
                prev = cur;
            }
        }
    }

    #[test]
    fn trivial_filtration_page_zero_is_cohomology_after_page_one() {
        // with all filtration degrees equal, E_1 is already H
        let states = boson_antighost_basis(4);
        let fc = filtered_from_states(&states, |_| 0).unwrap();
        let p1 = page(&fc, 1).unwrap();
        let mut by_degree: BTreeMap<i64, usize> = BTreeMap::new();
        for (&(p, q), &d) in &p1.dims {
            *by_degree.entry(p + q).or_insert(0) += d;
        }
        for &n in fc.labels.keys() {
            assert_eq!(by_degree.get(&n).copied().unwrap_or(0), fc.h_dim(n));
        }
    }
}
