//! Exact sparse linear algebra over the rationals.
//!
//! Matrices are immutable once built.  Rank is computed by fraction-free
//! integer elimination (rows are scaled to integers, then eliminated with
//! cross-multiplication and gcd normalization), so no floating point and no
//! rounding can ever occur.  Kernel bases, used by the spectral-sequence
//! machinery on small subquotients, use straightforward rational elimination.

use num::{BigInt, BigRational, Integer, One, Zero};
use std::collections::BTreeMap;
use std::sync::OnceLock;
use thiserror::Error;

/// Arbitrary-precision rational, always kept in reduced form with a positive
/// denominator by the backing implementation.
pub type Rational = BigRational;

/// Convenience constructor for small rationals.
pub fn rat(num: i64, den: i64) -> Rational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LinError {
    #[error("dimension mismatch: left is {left_rows}x{left_cols}, right is {right_rows}x{right_cols}")]
    ShapeMismatch {
        left_rows: usize,
        left_cols: usize,
        right_rows: usize,
        right_cols: usize,
    },
    #[error("entry ({row},{col}) outside a {rows}x{cols} matrix")]
    OutOfBounds {
        row: usize,
        col: usize,
        rows: usize,
        cols: usize,
    },
}

/// An immutable sparse matrix over the rationals.
#[derive(Debug, Default)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    entries: BTreeMap<(usize, usize), Rational>,
    rank_cache: OnceLock<usize>,
}

impl Clone for SparseMatrix {
    fn clone(&self) -> Self {
        let out = SparseMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.clone(),
            rank_cache: OnceLock::new(),
        };
        if let Some(r) = self.rank_cache.get() {
            let _ = out.rank_cache.set(*r);
        }
        out
    }
}

impl PartialEq for SparseMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.rows == other.rows && self.cols == other.cols && self.entries == other.entries
    }
}
impl Eq for SparseMatrix {}

impl SparseMatrix {
    /// Build from (row, col, value) triplets; zero values are dropped,
    /// duplicate positions are summed.
    pub fn from_triplets(
        rows: usize,
        cols: usize,
        triplets: impl IntoIterator<Item = (usize, usize, Rational)>,
    ) -> Result<Self, LinError> {
        let mut entries: BTreeMap<(usize, usize), Rational> = BTreeMap::new();
        for (r, c, v) in triplets {
            if r >= rows || c >= cols {
                return Err(LinError::OutOfBounds { row: r, col: c, rows, cols });
            }
            let slot = entries.entry((r, c)).or_insert_with(Rational::zero);
            *slot += v;
            if slot.is_zero() {
                entries.remove(&(r, c));
            }
        }
        Ok(SparseMatrix { rows, cols, entries, rank_cache: OnceLock::new() })
    }

    pub fn zero(rows: usize, cols: usize) -> Self {
        SparseMatrix { rows, cols, entries: BTreeMap::new(), rank_cache: OnceLock::new() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, row: usize, col: usize) -> Rational {
        self.entries.get(&(row, col)).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, &Rational)> {
        self.entries.iter().map(|(&(r, c), v)| (r, c, v))
    }

    /// Matrix product `self * other` (self applied after other).
    pub fn compose(&self, other: &SparseMatrix) -> Result<SparseMatrix, LinError> {
        if self.cols != other.rows {
            return Err(LinError::ShapeMismatch {
                left_rows: self.rows,
                left_cols: self.cols,
                right_rows: other.rows,
                right_cols: other.cols,
            });
        }
        // group left entries by column for the inner loop
        let mut by_col: BTreeMap<usize, Vec<(usize, &Rational)>> = BTreeMap::new();
        for (&(r, c), v) in &self.entries {
            by_col.entry(c).or_default().push((r, v));
        }
        let mut acc: BTreeMap<(usize, usize), Rational> = BTreeMap::new();
        for (&(k, j), bv) in &other.entries {
            if let Some(lefts) = by_col.get(&k) {
                for (i, av) in lefts {
                    let slot = acc.entry((*i, j)).or_insert_with(Rational::zero);
                    *slot += (*av).clone() * bv.clone();
                }
            }
        }
        acc.retain(|_, v| !v.is_zero());
        Ok(SparseMatrix { rows: self.rows, cols: other.cols, entries: acc, rank_cache: OnceLock::new() })
    }

    pub fn transpose(&self) -> SparseMatrix {
        let entries = self.entries.iter().map(|(&(r, c), v)| ((c, r), v.clone())).collect();
        SparseMatrix { rows: self.cols, cols: self.rows, entries, rank_cache: OnceLock::new() }
    }

    /// Exact rank, cached after the first computation.
    pub fn rank(&self) -> usize {
        *self.rank_cache.get_or_init(|| self.compute_rank())
    }

    pub fn kernel_dim(&self) -> usize {
        self.cols - self.rank()
    }

    /// Fraction-free elimination on integer-scaled rows.  Pivots are chosen
    /// by row sparsity to limit fill-in; after each elimination a row is
    /// divided by the gcd of its entries to control coefficient growth.
    fn compute_rank(&self) -> usize {
        let mut rows: Vec<BTreeMap<usize, BigInt>> = Vec::new();
        {
            let mut grouped: BTreeMap<usize, BTreeMap<usize, Rational>> = BTreeMap::new();
            for (&(r, c), v) in &self.entries {
                grouped.entry(r).or_default().insert(c, v.clone());
            }
            for (_, row) in grouped {
                let mut lcm = BigInt::one();
                for v in row.values() {
                    lcm = lcm.lcm(v.denom());
                }
                let int_row: BTreeMap<usize, BigInt> = row
                    .into_iter()
                    .map(|(c, v)| (c, v.numer() * (&lcm / v.denom())))
                    .collect();
                rows.push(int_row);
            }
        }
        let mut rank = 0usize;
        while !rows.is_empty() {
            // sparsest remaining row as pivot row
            let (pi, _) = rows
                .iter()
                .enumerate()
                .min_by_key(|(_, r)| r.len())
                .expect("non-empty");
            let pivot_row = rows.swap_remove(pi);
            if pivot_row.is_empty() {
                continue;
            }
            rank += 1;
            // within the pivot row choose the column occurring in fewest rows
            let mut col_use: BTreeMap<usize, usize> = pivot_row.keys().map(|&c| (c, 0usize)).collect();
            for r in &rows {
                for (c, n) in col_use.iter_mut() {
                    if r.contains_key(c) {
                        *n += 1;
                    }
                }
            }
            let (&pc, _) = col_use.iter().min_by_key(|(_, &n)| n).expect("non-empty row");
            let pv = pivot_row[&pc].clone();
            for row in rows.iter_mut() {
                let Some(f) = row.get(&pc).cloned() else { continue };
                // row <- pv * row - f * pivot_row   (eliminates column pc)
                let mut new_row: BTreeMap<usize, BigInt> = BTreeMap::new();
                for (c, v) in row.iter() {
                    new_row.insert(*c, v * &pv);
                }
                for (c, v) in pivot_row.iter() {
                    let slot = new_row.entry(*c).or_insert_with(BigInt::zero);
                    *slot -= v * &f;
                    if slot.is_zero() {
                        new_row.remove(c);
                    }
                }
                new_row.remove(&pc);
                if !new_row.is_empty() {
                    let mut g = BigInt::zero();
                    for v in new_row.values() {
                        g = g.gcd(v);
                    }
                    if !g.is_one() {
                        for v in new_row.values_mut() {
                            *v = &*v / &g;
                        }
                    }
                }
                *row = new_row;
            }
            rows.retain(|r| !r.is_empty());
        }
        rank
    }

    /// Basis of the right kernel as column vectors (dense, rational).
    /// Intended for the small matrices arising in subquotient computations.
    pub fn kernel_basis(&self) -> Vec<Vec<Rational>> {
        let (_, pivots, rref) = self.rref();
        let pivot_set: Vec<Option<usize>> = {
            let mut v = vec![None; self.cols];
            for (pr, &pc) in pivots.iter().enumerate() {
                v[pc] = Some(pr);
            }
            v
        };
        let mut basis = Vec::new();
        for free in 0..self.cols {
            if pivot_set[free].is_some() {
                continue;
            }
            let mut vec_out = vec![Rational::zero(); self.cols];
            vec_out[free] = Rational::one();
            for (pr, &pc) in pivots.iter().enumerate() {
                vec_out[pc] = -rref[pr].get(&free).cloned().unwrap_or_else(Rational::zero);
            }
            basis.push(vec_out);
        }
        basis
    }

    /// Reduced row echelon form; returns (rank, pivot columns, reduced rows).
    fn rref(&self) -> (usize, Vec<usize>, Vec<BTreeMap<usize, Rational>>) {
        let mut rows: Vec<BTreeMap<usize, Rational>> = {
            let mut grouped: BTreeMap<usize, BTreeMap<usize, Rational>> = BTreeMap::new();
            for (&(r, c), v) in &self.entries {
                grouped.entry(r).or_default().insert(c, v.clone());
            }
            grouped.into_values().collect()
        };
        let mut reduced: Vec<BTreeMap<usize, Rational>> = Vec::new();
        let mut pivots: Vec<usize> = Vec::new();
        for col in 0..self.cols {
            let Some(ri) = rows.iter().position(|r| r.contains_key(&col)) else {
                continue;
            };
            let mut pivot = rows.swap_remove(ri);
            let pv = pivot[&col].clone();
            for v in pivot.values_mut() {
                *v = &*v / &pv;
            }
            for r in rows.iter_mut().chain(reduced.iter_mut()) {
                if let Some(f) = r.get(&col).cloned() {
                    for (c, v) in pivot.iter() {
                        let slot = r.entry(*c).or_insert_with(Rational::zero);
                        *slot -= v * &f;
                        if slot.is_zero() {
                            r.remove(c);
                        }
                    }
                    r.remove(&col);
                }
            }
            pivots.push(col);
            reduced.push(pivot);
            if rows.is_empty() {
                break;
            }
        }
        (pivots.len(), pivots, reduced)
    }

    /// Solve `self * x = target` if consistent (dense target, dense result).
    pub fn solve(&self, target: &[Rational]) -> Option<Vec<Rational>> {
        assert_eq!(target.len(), self.rows, "target length must match row count");
        // eliminate on the augmented matrix
        let mut rows: Vec<(BTreeMap<usize, Rational>, Rational)> = {
            let mut grouped: BTreeMap<usize, BTreeMap<usize, Rational>> = BTreeMap::new();
            for (&(r, c), v) in &self.entries {
                grouped.entry(r).or_default().insert(c, v.clone());
            }
            (0..self.rows)
                .map(|r| (grouped.remove(&r).unwrap_or_default(), target[r].clone()))
                .collect()
        };
        let mut solved: Vec<(usize, BTreeMap<usize, Rational>, Rational)> = Vec::new();
        for col in 0..self.cols {
            let Some(ri) = rows.iter().position(|(r, _)| r.contains_key(&col)) else {
                continue;
            };
            let (mut pivot, mut rhs) = rows.swap_remove(ri);
            let pv = pivot[&col].clone();
            for v in pivot.values_mut() {
                *v = &*v / &pv;
            }
            rhs /= pv;
            for (r, b) in rows.iter_mut() {
                if let Some(f) = r.get(&col).cloned() {
                    for (c, v) in pivot.iter() {
                        let slot = r.entry(*c).or_insert_with(Rational::zero);
                        *slot -= v * &f;
                        if slot.is_zero() {
                            r.remove(c);
                        }
                    }
                    r.remove(&col);
                    *b -= rhs.clone() * f;
                }
            }
            solved.push((col, pivot, rhs));
        }
        // leftover rows must have zero right-hand side
        if rows.iter().any(|(r, b)| r.is_empty() && !b.is_zero()) {
            return None;
        }
        let mut x = vec![Rational::zero(); self.cols];
        // back-substitute (rows were fully reduced against later pivots only
        // partially, so walk solved rows in reverse)
        for (col, row, rhs) in solved.iter().rev() {
            let mut val = rhs.clone();
            for (c, v) in row {
                if c != col {
                    val -= v * &x[*c];
                }
            }
            x[*col] = val;
        }
        // verify (guards against inconsistent systems hidden in skipped rows)
        let mut check = vec![Rational::zero(); self.rows];
        for (&(r, c), v) in &self.entries {
            check[r] += v * &x[c];
        }
        if check.iter().zip(target).all(|(a, b)| a == b) {
            Some(x)
        } else {
            None
        }
    }

    /// Stack column vectors into a matrix.
    pub fn from_columns(rows: usize, cols: &[Vec<Rational>]) -> SparseMatrix {
        let mut entries = BTreeMap::new();
        for (j, col) in cols.iter().enumerate() {
            assert_eq!(col.len(), rows);
            for (i, v) in col.iter().enumerate() {
                if !v.is_zero() {
                    entries.insert((i, j), v.clone());
                }
            }
        }
        SparseMatrix { rows, cols: cols.len(), entries, rank_cache: OnceLock::new() }
    }

    /// Apply to a dense vector.
    pub fn apply(&self, x: &[Rational]) -> Vec<Rational> {
        assert_eq!(x.len(), self.cols);
        let mut out = vec![Rational::zero(); self.rows];
        for (&(r, c), v) in &self.entries {
            if !x[c].is_zero() {
                out[r] += v * &x[c];
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn dense_rank_oracle(m: &SparseMatrix) -> usize {
        // naive dense rational Gaussian elimination
        let mut a: Vec<Vec<Rational>> = vec![vec![Rational::zero(); m.cols()]; m.rows()];
        for (r, c, v) in m.iter() {
            a[r][c] = v.clone();
        }
        let mut rank = 0;
        let mut row = 0;
        for col in 0..m.cols() {
            let Some(p) = (row..m.rows()).find(|&r| !a[r][col].is_zero()) else { continue };
            a.swap(row, p);
            let pv = a[row][col].clone();
            for r in 0..m.rows() {
                if r != row && !a[r][col].is_zero() {
                    let f = a[r][col].clone() / pv.clone();
                    for c in col..m.cols() {
                        let sub = a[row][c].clone() * f.clone();
                        a[r][c] -= sub;
                    }
                }
            }
            rank += 1;
            row += 1;
            if row == m.rows() {
                break;
            }
        }
        rank
    }

    fn mat(rows: usize, cols: usize, data: &[(usize, usize, i64)]) -> SparseMatrix {
        SparseMatrix::from_triplets(rows, cols, data.iter().map(|&(r, c, v)| (r, c, rat(v, 1)))).unwrap()
    }

    #[test]
    fn rank_of_examples() {
        // 2x2 identity
        let id = mat(2, 2, &[(0, 0, 1), (1, 1, 1)]);
        assert_eq!(id.rank(), 2);
        // the 3x3 all-ones matrix has rank 1
        let ones = mat(3, 3, &[
            (0, 0, 1), (0, 1, 1), (0, 2, 1),
            (1, 0, 1), (1, 1, 1), (1, 2, 1),
            (2, 0, 1), (2, 1, 1), (2, 2, 1),
        ]);
        assert_eq!(ones.rank(), 1);
        assert_eq!(ones.kernel_dim(), 2);
        // zero matrix
        assert_eq!(SparseMatrix::zero(4, 7).rank(), 0);
    }

    #[test]
    fn rational_entries_are_exact() {
        let m = SparseMatrix::from_triplets(
            2,
            2,
            vec![
                (0, 0, rat(1, 3)),
                (0, 1, rat(1, 6)),
                (1, 0, rat(2, 3)),
                (1, 1, rat(1, 3)),
            ],
        )
        .unwrap();
        // second row is exactly twice the first
        assert_eq!(m.rank(), 1);
    }

    #[test]
    fn compose_shapes_and_values() {
        let a = mat(2, 3, &[(0, 0, 1), (0, 2, 2), (1, 1, -1)]);
        let b = mat(3, 2, &[(0, 0, 3), (1, 0, 1), (2, 1, 5)]);
        let ab = a.compose(&b).unwrap();
        assert_eq!((ab.rows(), ab.cols()), (2, 2));
        assert_eq!(ab.get(0, 0), rat(3, 1));
        assert_eq!(ab.get(0, 1), rat(10, 1));
        assert_eq!(ab.get(1, 0), rat(-1, 1));
        assert!(a.compose(&a).is_err());
    }

    #[test]
    fn kernel_basis_spans_kernel() {
        let m = mat(2, 4, &[(0, 0, 1), (0, 1, 1), (1, 2, 1), (1, 3, -1)]);
        let ker = m.kernel_basis();
        assert_eq!(ker.len(), m.kernel_dim());
        for v in &ker {
            assert!(m.apply(v).iter().all(|x| x.is_zero()));
        }
    }

    #[test]
    fn solve_round_trip() {
        let m = mat(3, 3, &[(0, 0, 2), (1, 1, 3), (2, 0, 1), (2, 2, 1)]);
        let target = vec![rat(4, 1), rat(6, 1), rat(5, 1)];
        let x = m.solve(&target).unwrap();
        assert_eq!(m.apply(&x), target);
        // inconsistent system
        let sing = mat(2, 1, &[(0, 0, 1), (1, 0, 1)]);
        assert!(sing.solve(&[rat(1, 1), rat(2, 1)]).is_none());
    }

    fn arb_matrix() -> impl Strategy<Value = SparseMatrix> {
        (1usize..7, 1usize..7).prop_flat_map(|(r, c)| {
            proptest::collection::vec((0..r, 0..c, -4i64..5, 1i64..4), 0..20).prop_map(
                move |trips| {
                    SparseMatrix::from_triplets(
                        r,
                        c,
                        trips.into_iter().map(|(i, j, n, d)| (i, j, rat(n, d))),
                    )
                    .unwrap()
                },
            )
        })
    }

    proptest! {
        #[test]
        fn rank_matches_dense_oracle(m in arb_matrix()) {
            prop_assert_eq!(m.rank(), dense_rank_oracle(&m));
        }

        #[test]
        fn rank_equals_transpose_rank(m in arb_matrix()) {
            prop_assert_eq!(m.rank(), m.transpose().rank());
        }

        #[test]
        fn rank_plus_kernel_is_cols(m in arb_matrix()) {
            prop_assert_eq!(m.rank() + m.kernel_dim(), m.cols());
            let ker = m.kernel_basis();
            prop_assert_eq!(ker.len(), m.kernel_dim());
            for v in &ker {
                prop_assert!(m.apply(v).iter().all(|x| x.is_zero()));
            }
        }

        #[test]
        fn compose_rank_bounded(a in arb_matrix(), b in arb_matrix()) {
            if a.cols() == b.rows() {
                let ab = a.compose(&b).unwrap();
                prop_assert!(ab.rank() <= a.rank().min(b.rank()));
            }
        }
    }
}
