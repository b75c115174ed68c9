//! Exact-arithmetic laboratory for truncated BRST reduction complexes of
//! spectrally flowed relaxed highest-weight modules over affine sl2.
//!
//! The crate builds finite, differential-stable truncations of the reduction
//! complex in a Fock-style mode basis, constructs the differential by two
//! independent routes (a commutator walk and closed-form expansions), and
//! computes cohomology three ways: direct sparse linear algebra over the
//! rationals, a Kunneth factorization into small model complexes, and the
//! spectral sequence of the standard vertex-algebra filtration.  Everything
//! is exact; no floating point is used anywhere.

pub mod brst;
pub mod catalog;
pub mod combinatorics;
pub mod exactlin;
pub mod fock;
pub mod homology;
pub mod report;
pub mod specseq;
pub mod structural;
