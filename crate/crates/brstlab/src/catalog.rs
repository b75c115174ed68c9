//! Admissible-level bookkeeping: exact rational weight tables for the
//! relevant sl2 and Virasoro minimal-model modules, central charges, and
//! the reduction-prediction lookup used by the `catalog` and `reduce`
//! subcommands.  Everything here is closed-form rational arithmetic.

use crate::exactlin::{rat, Rational};
use num::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CatalogError {
    #[error("invalid level: {0}")]
    InvalidLevel(String),
    #[error("indices out of range: {0}")]
    OutOfRange(String),
    #[error("invalid module descriptor: {0}")]
    InvalidDescriptor(String),
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 { a.abs() } else { gcd(b, a % b) }
}

/// An admissible level k = -2 + u/v with u >= 2, v >= 1 coprime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdmissibleLevel {
    pub u: i64,
    pub v: i64,
}

impl AdmissibleLevel {
    pub fn new(u: i64, v: i64) -> Result<Self, CatalogError> {
        if u < 2 {
            return Err(CatalogError::InvalidLevel(format!("u = {u} must be >= 2")));
        }
        if v < 1 {
            return Err(CatalogError::InvalidLevel(format!("v = {v} must be >= 1")));
        }
        if gcd(u, v) != 1 {
            return Err(CatalogError::InvalidLevel(format!(
                "u = {u}, v = {v} must be coprime (gcd {})",
                gcd(u, v)
            )));
        }
        Ok(AdmissibleLevel { u, v })
    }

    pub fn k(&self) -> Rational {
        rat(-2, 1) + rat(self.u, self.v)
    }

    fn check_range(&self, r: i64, s: i64) -> Result<(), CatalogError> {
        if r < 1 || r > self.u - 1 || s < 1 || s > self.v - 1 {
            return Err(CatalogError::OutOfRange(format!(
                "(r, s) = ({r}, {s}) outside 1..={} x 1..={}",
                self.u - 1,
                self.v - 1
            )));
        }
        Ok(())
    }
}

/// Kinds of modules the reduction table knows about.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ModuleKind {
    /// Simple Virasoro minimal-model module L_{r,s}.
    VirL,
    /// Fully relaxed simple with a coset label.
    RelaxedE,
    /// Lower semi-relaxed simple.
    RelaxedEminus,
    /// Upper semi-relaxed simple (reductions not tabulated here).
    RelaxedEplus,
    /// Projective cover in the relaxed category (needs s <= v-2).
    ProjectiveP,
}

/// A module tag: kind, minimal-model indices, spectral flow, and (for the
/// fully relaxed family) the coset label lambda mod 1.
#[derive(Debug, Clone, PartialEq)]
pub struct ModuleDescriptor {
    pub kind: ModuleKind,
    pub r: i64,
    pub s: i64,
    pub flow: i64,
    pub coset: Option<Rational>,
}

impl ModuleDescriptor {
    pub fn new(kind: ModuleKind, r: i64, s: i64, flow: i64) -> Self {
        ModuleDescriptor { kind, r, s, flow, coset: None }
    }

    pub fn with_coset(mut self, lambda: Rational) -> Self {
        self.coset = Some(lambda);
        self
    }
}

/// Conformal weight h_{r,s} of the (u, v) Virasoro minimal model.
pub fn vir_weight(level: &AdmissibleLevel, r: i64, s: i64) -> Result<Rational, CatalogError> {
    level.check_range(r, s)?;
    let (u, v) = (level.u, level.v);
    let num = rat((v * r - u * s).pow(2) - (u - v).pow(2), 1);
    Ok(num / rat(4 * u * v, 1))
}

/// The sl2 weight lambda_{r,s} and conformal weight Delta_{r,s} of the
/// relaxed family bottom.
pub fn sl2_weights(
    level: &AdmissibleLevel,
    r: i64,
    s: i64,
) -> Result<(Rational, Rational), CatalogError> {
    level.check_range(r, s)?;
    Ok(sl2_weights_unchecked(level, r, s))
}

fn sl2_weights_unchecked(level: &AdmissibleLevel, r: i64, s: i64) -> (Rational, Rational) {
    let (u, v) = (level.u, level.v);
    let lambda = rat(r - 1, 1) - rat(u * s, v);
    let delta = rat((v * r - u * s).pow(2) - v * v, 1) / rat(4 * u * v, 1);
    (lambda, delta)
}

/// The s = 0 column of the weight formulas, used for the ordinary (highest
/// weight) modules.  `extended` is true to flag that these indices sit
/// outside the relaxed range 1..=v-1 and the formulas are evaluated verbatim.
#[derive(Debug, Clone, PartialEq)]
pub struct OrdinaryWeights {
    pub lambda: Rational,
    pub delta: Rational,
    pub extended: bool,
}

pub fn ordinary_weights(level: &AdmissibleLevel, r: i64) -> Result<OrdinaryWeights, CatalogError> {
    if r < 1 || r > level.u - 1 {
        return Err(CatalogError::OutOfRange(format!("r = {r} outside 1..={}", level.u - 1)));
    }
    let (lambda, delta) = sl2_weights_unchecked(level, r, 0);
    Ok(OrdinaryWeights { lambda, delta, extended: true })
}

/// Central charges of the three vertex algebras in play.
#[derive(Debug, Clone, PartialEq)]
pub struct CentralCharges {
    pub c_vir: Rational,
    pub c_lattice: Rational,
    pub c_sl2: Rational,
}

pub fn central_charges(level: &AdmissibleLevel) -> Result<CentralCharges, CatalogError> {
    let k = level.k();
    let t = &k + rat(2, 1);
    if t.is_zero() {
        return Err(CatalogError::InvalidLevel("critical level k = -2".into()));
    }
    let c_vir = rat(13, 1) - rat(6, 1) * (&t + Rational::one() / &t);
    let c_lattice = rat(2, 1) + rat(6, 1) * &k;
    let c_sl2 = rat(3, 1) * &k / &t;
    Ok(CentralCharges { c_vir, c_lattice, c_sl2 })
}

/// Canonical representative of the Kac-table identification
/// (r, s) ~ (u-r, v-s): the lexicographically smaller pair.
pub fn identify(level: &AdmissibleLevel, r: i64, s: i64) -> Result<(i64, i64), CatalogError> {
    level.check_range(r, s)?;
    let other = (level.u - r, level.v - s);
    Ok(std::cmp::min((r, s), other))
}

/// Outcome of a predicted reduction: a Virasoro simple with multiplicity,
/// zero, or explicitly untabulated.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Reduction {
    Vir { r: i64, s: i64, multiplicity: u32 },
    Zero,
    OutOfScope,
}

// coset labels live modulo 2
fn coset_rep(x: &Rational) -> Rational {
    let two = rat(2, 1);
    let f = x - (x / &two).floor() * &two;
    debug_assert!(!f.is_negative());
    f
}

fn validate_descriptor(
    level: &AdmissibleLevel,
    m: &ModuleDescriptor,
) -> Result<(), CatalogError> {
    if level.v == 1 && m.kind != ModuleKind::VirL {
        return Err(CatalogError::InvalidDescriptor(
            "v = 1 levels carry a finite semisimple category with no relaxed or projective modules".into(),
        ));
    }
    level.check_range(m.r, m.s).map_err(|e| CatalogError::InvalidDescriptor(e.to_string()))?;
    if m.kind == ModuleKind::ProjectiveP && m.s > level.v - 2 {
        return Err(CatalogError::InvalidDescriptor(format!(
            "projective family needs s <= {}, got s = {}",
            level.v - 2,
            m.s
        )));
    }
    if m.kind == ModuleKind::RelaxedE {
        if let Some(lam) = &m.coset {
            let (l1, _) = sl2_weights_unchecked(level, m.r, m.s);
            let (l2, _) = sl2_weights_unchecked(level, level.u - m.r, level.v - m.s);
            let f = coset_rep(lam);
            if f == coset_rep(&l1) || f == coset_rep(&l2) {
                return Err(CatalogError::InvalidDescriptor(format!(
                    "coset label {lam} hits an excluded coset of ({}, {})",
                    m.r, m.s
                )));
            }
        }
    }
    Ok(())
}

/// Predicted minus reduction of a flowed module, as a table lookup:
/// the relaxed simples reduce to L_{r,s} at flow 0 and vanish otherwise;
/// the projectives reduce to L_{r,s} at flow 0, L_{r,s+1} at flow -1, and
/// vanish otherwise; the upper semi-relaxed family is untabulated.
pub fn predict_reduction(
    level: &AdmissibleLevel,
    m: &ModuleDescriptor,
) -> Result<Reduction, CatalogError> {
    validate_descriptor(level, m)?;
    Ok(match m.kind {
        ModuleKind::VirL => {
            return Err(CatalogError::InvalidDescriptor(
                "Virasoro simples are reduction outputs, not inputs".into(),
            ))
        }
        ModuleKind::RelaxedE | ModuleKind::RelaxedEminus => {
            if m.flow == 0 {
                Reduction::Vir { r: m.r, s: m.s, multiplicity: 1 }
            } else {
                Reduction::Zero
            }
        }
        ModuleKind::RelaxedEplus => Reduction::OutOfScope,
        ModuleKind::ProjectiveP => match m.flow {
            0 => Reduction::Vir { r: m.r, s: m.s, multiplicity: 1 },
            -1 => Reduction::Vir { r: m.r, s: m.s + 1, multiplicity: 1 },
            _ => Reduction::Zero,
        },
    })
}

/// One row of the per-level weight table.
#[derive(Debug, Clone, PartialEq)]
pub struct TableRow {
    pub r: i64,
    pub s: i64,
    pub lambda: Rational,
    pub delta: Rational,
    pub h: Rational,
    pub canonical: (i64, i64),
}

/// The full weight table of a level, row per (r, s) in the fundamental
/// ranges, sorted by (r, s).
pub fn level_table(level: &AdmissibleLevel) -> Vec<TableRow> {
    let mut out = Vec::new();
    for r in 1..level.u {
        for s in 1..level.v {
            let (lambda, delta) = sl2_weights_unchecked(level, r, s);
            let h = vir_weight(level, r, s).expect("in range");
            let canonical = identify(level, r, s).expect("in range");
            out.push(TableRow { r, s, lambda, delta, h, canonical });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const GRID: [(i64, i64); 5] = [(3, 2), (5, 2), (3, 4), (4, 3), (5, 3)];

    #[test]
    fn level_validation() {
        assert!(AdmissibleLevel::new(3, 4).is_ok());
        assert!(AdmissibleLevel::new(4, 2).is_err());
        assert!(AdmissibleLevel::new(1, 1).is_err());
        assert!(AdmissibleLevel::new(2, 0).is_err());
        assert_eq!(AdmissibleLevel::new(3, 4).unwrap().k(), rat(-5, 4));
    }

    #[test]
    fn ising_weights() {
        let lvl = AdmissibleLevel::new(3, 4).unwrap();
        assert_eq!(vir_weight(&lvl, 1, 1).unwrap(), rat(0, 1));
        assert_eq!(vir_weight(&lvl, 2, 1).unwrap(), rat(1, 2));
        assert_eq!(vir_weight(&lvl, 1, 2).unwrap(), rat(1, 16));
        assert!(vir_weight(&lvl, 3, 1).is_err());
        assert!(vir_weight(&lvl, 0, 1).is_err());
    }

    #[test]
    fn relaxed_bottom_weights() {
        let lvl = AdmissibleLevel::new(3, 4).unwrap();
        assert_eq!(sl2_weights(&lvl, 1, 1).unwrap(), (rat(-3, 4), rat(-5, 16)));
        let lvl2 = AdmissibleLevel::new(3, 2).unwrap();
        assert_eq!(sl2_weights(&lvl2, 1, 1).unwrap(), (rat(-3, 2), rat(-1, 8)));
    }

    #[test]
    fn delta_is_h_plus_quarter_level_on_the_grid() {
        for (u, v) in GRID {
            let lvl = AdmissibleLevel::new(u, v).unwrap();
            let quarter = lvl.k() / rat(4, 1);
            for r in 1..u {
                for s in 1..v {
                    let (_, delta) = sl2_weights(&lvl, r, s).unwrap();
                    let h = vir_weight(&lvl, r, s).unwrap();
                    assert_eq!(delta, h + &quarter, "({u},{v}) ({r},{s})");
                }
            }
        }
    }

    #[test]
    fn kac_table_symmetry_on_the_grid() {
        for (u, v) in GRID {
            let lvl = AdmissibleLevel::new(u, v).unwrap();
            for r in 1..u {
                for s in 1..v {
                    assert_eq!(
                        vir_weight(&lvl, r, s).unwrap(),
                        vir_weight(&lvl, u - r, v - s).unwrap()
                    );
                    assert_eq!(
                        identify(&lvl, r, s).unwrap(),
                        identify(&lvl, u - r, v - s).unwrap()
                    );
                }
            }
        }
    }

    #[test]
    fn central_charge_values() {
        let c34 = central_charges(&AdmissibleLevel::new(3, 4).unwrap()).unwrap();
        assert_eq!(c34.c_vir, rat(1, 2));
        assert_eq!(c34.c_lattice, rat(-11, 2));
        let c32 = central_charges(&AdmissibleLevel::new(3, 2).unwrap()).unwrap();
        assert_eq!(c32.c_vir, rat(0, 1));
        // c_vir is symmetric under u <-> v on the coprime pairs where both
        // orders are admissible
        let c43 = central_charges(&AdmissibleLevel::new(4, 3).unwrap()).unwrap();
        let c34b = central_charges(&AdmissibleLevel::new(3, 4).unwrap()).unwrap();
        assert_eq!(c43.c_vir, c34b.c_vir);
    }

    #[test]
    fn identification_picks_the_smaller_corner() {
        let lvl = AdmissibleLevel::new(3, 4).unwrap();
        assert_eq!(identify(&lvl, 2, 3).unwrap(), (1, 1));
        let lvl2 = AdmissibleLevel::new(2, 3).unwrap();
        assert_eq!(identify(&lvl2, 1, 1).unwrap(), (1, 1));
    }

    #[test]
    fn reduction_table() {
        let lvl = AdmissibleLevel::new(3, 4).unwrap();
        let e = ModuleDescriptor::new(ModuleKind::RelaxedE, 1, 2, 0);
        assert_eq!(
            predict_reduction(&lvl, &e).unwrap(),
            Reduction::Vir { r: 1, s: 2, multiplicity: 1 }
        );
        let e_flowed = ModuleDescriptor::new(ModuleKind::RelaxedEminus, 1, 2, 2);
        assert_eq!(predict_reduction(&lvl, &e_flowed).unwrap(), Reduction::Zero);
        let p = ModuleDescriptor::new(ModuleKind::ProjectiveP, 1, 1, -1);
        assert_eq!(
            predict_reduction(&lvl, &p).unwrap(),
            Reduction::Vir { r: 1, s: 2, multiplicity: 1 }
        );
        let p2 = ModuleDescriptor::new(ModuleKind::ProjectiveP, 1, 1, 3);
        assert_eq!(predict_reduction(&lvl, &p2).unwrap(), Reduction::Zero);
        let eplus = ModuleDescriptor::new(ModuleKind::RelaxedEplus, 1, 1, 0);
        assert_eq!(predict_reduction(&lvl, &eplus).unwrap(), Reduction::OutOfScope);
    }

    #[test]
    fn reduction_is_supported_only_at_small_flow() {
        for (u, v) in GRID {
            let lvl = AdmissibleLevel::new(u, v).unwrap();
            for r in 1..u {
                for s in 1..v {
                    for ell in -3..=3 {
                        let e = ModuleDescriptor::new(ModuleKind::RelaxedE, r, s, ell);
                        let red = predict_reduction(&lvl, &e).unwrap();
                        assert_eq!(red != Reduction::Zero, ell == 0);
                    }
                }
            }
        }
    }

    #[test]
    fn descriptor_validation() {
        let lvl = AdmissibleLevel::new(3, 4).unwrap();
        // projective family stops one short of the top column
        let p_bad = ModuleDescriptor::new(ModuleKind::ProjectiveP, 1, 3, 0);
        assert!(predict_reduction(&lvl, &p_bad).is_err());
        // coset label collisions are rejected
        let lam = sl2_weights(&lvl, 1, 2).unwrap().0;
        let e_bad = ModuleDescriptor::new(ModuleKind::RelaxedE, 1, 2, 0).with_coset(lam + rat(8, 1));
        assert!(predict_reduction(&lvl, &e_bad).is_err());
        let e_ok = ModuleDescriptor::new(ModuleKind::RelaxedE, 1, 2, 0).with_coset(rat(1, 3));
        assert!(predict_reduction(&lvl, &e_ok).is_ok());
        // strongly rational levels have no relaxed modules at all
        let lvl_rat = AdmissibleLevel::new(5, 1).unwrap();
        let e = ModuleDescriptor::new(ModuleKind::RelaxedE, 1, 1, 0);
        assert!(predict_reduction(&lvl_rat, &e).is_err());
    }

    #[test]
    fn ordinary_column_is_flagged_as_an_extension() {
        let lvl = AdmissibleLevel::new(3, 2).unwrap();
        let w = ordinary_weights(&lvl, 2).unwrap();
        assert!(w.extended);
        assert_eq!(w.lambda, rat(1, 1));
        assert_eq!(w.delta, rat(1, 2));
        assert!(ordinary_weights(&lvl, 3).is_err());
    }

    #[test]
    fn table_rows_cover_the_kac_box() {
        let lvl = AdmissibleLevel::new(3, 4).unwrap();
        let table = level_table(&lvl);
        assert_eq!(table.len(), 6);
        let hs: Vec<Rational> = table.iter().map(|row| row.h.clone()).collect();
        assert!(hs.contains(&rat(0, 1)));
        assert!(hs.contains(&rat(1, 2)));
        assert!(hs.contains(&rat(1, 16)));
    }
}
