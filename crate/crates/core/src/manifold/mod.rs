//! The manifold data model, built-in catalog, manifest ingestion, the
//! connected-sum expression grammar and the Wu existence decision.
//!
//! A model is the closed-oriented-4-manifold data the invariant arithmetic
//! consumes: `b_1`, the intersection form on free `H^2`, and geometric
//! hypothesis flags. Torsion is ignored throughout; `b_0 = b_4 = 1` and
//! `b_3 = b_1` are assumed (connected manifolds, Poincare duality).

mod catalog;
mod expr;

pub use catalog::{Catalog, ManifestError};
pub use expr::{parse, Expr, ParseError};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lattice::{CohomologyClass, IntersectionForm, LatticeError, SignatureData};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("{name}: kahler flag requires symplectic flag")]
    KahlerWithoutSymplectic { name: String },
    #[error("{name}: symplectic data present but symplectic flag unset")]
    DataWithoutSymplectic { name: String },
    #[error("{name}: canonical class {class} is not characteristic")]
    CanonicalNotCharacteristic { name: String, class: String },
    #[error("{name}: spin flag requires an even form, diagonal entry {entry} at {index} is odd")]
    SpinOddDiagonal { name: String, index: usize, entry: i64 },
    #[error("{name}: lattice error: {source}")]
    Lattice {
        name: String,
        #[source]
        source: LatticeError,
    },
}

/// Where a model came from; rules may trust catalog data more than parses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Catalog,
    Parsed,
    Manifest,
}

/// Canonical class and symplectic class of a symplectic structure, in the
/// basis of the model's form.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymplecticData {
    pub canonical_class: CohomologyClass,
    pub symplectic_class: CohomologyClass,
}

/// Geometric hypothesis flags; `psc` means the manifold admits a metric of
/// nonnegative scalar curvature.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeometricFlags {
    pub simply_connected: bool,
    pub spin: bool,
    pub kahler: bool,
    pub symplectic: bool,
    pub psc: bool,
    pub symplectic_data: Option<SymplecticData>,
}

impl GeometricFlags {
    pub fn none() -> Self {
        Self {
            simply_connected: false,
            spin: false,
            kahler: false,
            symplectic: false,
            psc: false,
            symplectic_data: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifoldModel {
    name: String,
    b1: u32,
    form: IntersectionForm,
    flags: GeometricFlags,
    provenance: Provenance,
}

impl ManifoldModel {
    pub fn new(
        name: impl Into<String>,
        b1: u32,
        form: IntersectionForm,
        flags: GeometricFlags,
        provenance: Provenance,
    ) -> Result<Self, ModelError> {
        let name = name.into();
        if flags.kahler && !flags.symplectic {
            return Err(ModelError::KahlerWithoutSymplectic { name });
        }
        if flags.symplectic_data.is_some() && !flags.symplectic {
            return Err(ModelError::DataWithoutSymplectic { name });
        }
        if let Some(data) = &flags.symplectic_data {
            let characteristic = form
                .is_characteristic(&data.canonical_class)
                .map_err(|source| ModelError::Lattice { name: name.clone(), source })?;
            if !characteristic {
                return Err(ModelError::CanonicalNotCharacteristic {
                    name,
                    class: data.canonical_class.to_string(),
                });
            }
            form.check_class(&data.symplectic_class)
                .map_err(|source| ModelError::Lattice { name: name.clone(), source })?;
        }
        if flags.spin {
            for i in 0..form.rank() {
                let entry = form.entry(i, i);
                if entry % 2 != 0 {
                    return Err(ModelError::SpinOddDiagonal { name, index: i, entry });
                }
            }
        }
        Ok(Self { name, b1, form, flags, provenance })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn b1(&self) -> u32 {
        self.b1
    }

    pub fn form(&self) -> &IntersectionForm {
        &self.form
    }

    pub fn flags(&self) -> &GeometricFlags {
        &self.flags
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn signature_data(&self) -> SignatureData {
        self.form.signature_data()
    }

    pub fn b2(&self) -> usize {
        self.form.rank()
    }

    pub fn b2_plus(&self) -> usize {
        self.signature_data().b2_plus
    }

    /// `chi = 2(1 - b_1) + b_2` for connected closed oriented 4-manifolds.
    pub fn euler_characteristic(&self) -> i64 {
        2 * (1 - self.b1 as i64) + self.form.rank() as i64
    }

    pub fn signature(&self) -> i64 {
        self.signature_data().sigma
    }

    /// `kappa = 2 chi + 3 sigma`, the square every Wu witness must attain.
    pub fn kappa(&self) -> i64 {
        2 * self.euler_characteristic() + 3 * self.signature()
    }

    /// The same manifold with reversed orientation: form negated,
    /// orientation-dependent flags dropped.
    pub fn reversed(&self) -> Self {
        Self {
            name: format!("~{}", self.name),
            b1: self.b1,
            form: self.form.reverse_orientation(),
            flags: GeometricFlags {
                simply_connected: self.flags.simply_connected,
                spin: self.flags.spin,
                kahler: false,
                symplectic: false,
                // scalar curvature does not see the orientation
                psc: self.flags.psc,
                symplectic_data: None,
            },
            provenance: Provenance::Parsed,
        }
    }

    pub(crate) fn with_name(mut self, name: String) -> Self {
        self.name = name;
        self
    }

    /// Wu-theorem decision: does the model admit an almost complex structure?
    ///
    /// Witness search runs over `||c||_inf <= bound`; definite forms extend
    /// the bound to the provable one so that their verdicts are decisions,
    /// never `Indeterminate`.
    pub fn admits_almost_complex(&self, bound: i64) -> Result<WuVerdict, LatticeError> {
        let kappa = self.kappa();
        let sig = self.signature_data();
        let rank = self.form.rank();
        if rank == 0 {
            return Ok(if kappa == 0 {
                WuVerdict::Yes { witnesses: vec![CohomologyClass::zero(0)] }
            } else {
                WuVerdict::No { reason: WuObstruction::RankZeroKappaNonzero { kappa } }
            });
        }
        let definite = sig.b2_plus == 0 || sig.b2_minus == 0;
        if definite {
            if sig.b2_plus == 0 && kappa > 0 {
                return Ok(WuVerdict::No {
                    reason: WuObstruction::NegativeDefinite { kappa },
                });
            }
            if sig.b2_minus == 0 && kappa < 0 {
                return Ok(WuVerdict::No {
                    reason: WuObstruction::PositiveDefinite { kappa },
                });
            }
            // c_i^2 <= |kappa| * (P^{-1})_ii for the positive definite P = +-Q,
            // so the search below is exhaustive and the verdict is a proof
            let positive = if sig.b2_minus == 0 {
                self.form.clone()
            } else {
                self.form.reverse_orientation()
            };
            let max_inv_diag = positive.inverse_diagonal().into_iter().max().unwrap_or(0);
            let definite_bound = isqrt_ceil(kappa.unsigned_abs() * max_inv_diag as u64);
            let search = bound.max(definite_bound);
            let witnesses = self.form.enumerate_characteristic(search, Some(kappa))?;
            return Ok(if witnesses.is_empty() {
                WuVerdict::No {
                    reason: WuObstruction::ExhaustedDefiniteBound { bound: search },
                }
            } else {
                WuVerdict::Yes { witnesses }
            });
        }
        let witnesses = self.form.enumerate_characteristic(bound, Some(kappa))?;
        Ok(if witnesses.is_empty() {
            WuVerdict::Indeterminate { box_searched: bound }
        } else {
            WuVerdict::Yes { witnesses }
        })
    }
}

fn isqrt_ceil(v: u64) -> i64 {
    let mut r = (v as f64).sqrt() as u64;
    while r * r > v {
        r -= 1;
    }
    while r * r < v {
        r += 1;
    }
    r as i64
}

/// Proof-grade reasons an almost complex structure cannot exist.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum WuObstruction {
    RankZeroKappaNonzero { kappa: i64 },
    NegativeDefinite { kappa: i64 },
    PositiveDefinite { kappa: i64 },
    ExhaustedDefiniteBound { bound: i64 },
}

impl std::fmt::Display for WuObstruction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::RankZeroKappaNonzero { kappa } => {
                write!(f, "rank 0, kappa={kappa}!=0")
            }
            Self::NegativeDefinite { kappa } => {
                write!(f, "negative definite, kappa={kappa}>0")
            }
            Self::PositiveDefinite { kappa } => {
                write!(f, "positive definite, kappa={kappa}<0")
            }
            Self::ExhaustedDefiniteBound { bound } => {
                write!(f, "definite form, no witness up to the exhaustive bound {bound}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "status")]
pub enum WuVerdict {
    Yes { witnesses: Vec<CohomologyClass> },
    No { reason: WuObstruction },
    Indeterminate { box_searched: i64 },
}

/// Parse a connected-sum expression and build its model against a catalog.
pub fn parse_expression(text: &str, catalog: &Catalog) -> Result<ManifoldModel, ParseError> {
    let expr = parse(text)?;
    expr.build(catalog)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn builtin(name: &str) -> ManifoldModel {
        Catalog::builtin().lookup(name).unwrap().clone()
    }

    #[test]
    fn euler_characteristics_of_catalog() {
        assert_eq!(builtin("S4").euler_characteristic(), 2);
        assert_eq!(builtin("CP2").euler_characteristic(), 3);
        assert_eq!(builtin("K3").euler_characteristic(), 24);
    }

    #[test]
    fn kappa_of_catalog() {
        assert_eq!(builtin("S4").kappa(), 4);
        assert_eq!(builtin("CP2").kappa(), 9);
        assert_eq!(builtin("CP2bar").kappa(), 3);
    }

    #[test]
    fn wu_s4_is_no() {
        let verdict = builtin("S4").admits_almost_complex(5).unwrap();
        assert_eq!(
            verdict,
            WuVerdict::No { reason: WuObstruction::RankZeroKappaNonzero { kappa: 4 } }
        );
    }

    #[test]
    fn wu_cp2_finds_plus_minus_three() {
        let verdict = builtin("CP2").admits_almost_complex(3).unwrap();
        match verdict {
            WuVerdict::Yes { witnesses } => {
                assert_eq!(
                    witnesses,
                    vec![CohomologyClass::new(vec![-3]), CohomologyClass::new(vec![3])]
                );
            }
            other => panic!("expected Yes, got {other:?}"),
        }
    }

    #[test]
    fn wu_cp2bar_is_no() {
        let verdict = builtin("CP2bar").admits_almost_complex(5).unwrap();
        assert_eq!(
            verdict,
            WuVerdict::No { reason: WuObstruction::NegativeDefinite { kappa: 3 } }
        );
    }

    #[test]
    fn wu_cp2_decides_even_with_small_box() {
        // definite forms extend the search to the provable bound
        let verdict = builtin("CP2").admits_almost_complex(1).unwrap();
        assert!(matches!(verdict, WuVerdict::Yes { .. }));
    }

    #[test]
    fn wu_k3_indefinite_finds_zero() {
        let verdict = builtin("K3").admits_almost_complex(1).unwrap();
        match verdict {
            WuVerdict::Yes { witnesses } => {
                assert!(witnesses.contains(&CohomologyClass::zero(22)));
            }
            other => panic!("expected Yes, got {other:?}"),
        }
    }

    #[test]
    fn reversal_fixes_chi_negates_sigma() {
        for name in ["S4", "CP2", "CP2bar", "S2xS2", "K3"] {
            let m = builtin(name);
            let r = m.reversed();
            assert_eq!(m.euler_characteristic(), r.euler_characteristic());
            assert_eq!(m.signature(), -r.signature());
        }
    }

    #[test]
    fn spin_flag_rejects_odd_diagonal() {
        let err = ManifoldModel::new(
            "bad",
            0,
            IntersectionForm::diagonal(&[1]).unwrap(),
            GeometricFlags { spin: true, ..GeometricFlags::none() },
            Provenance::Manifest,
        )
        .unwrap_err();
        assert!(matches!(err, ModelError::SpinOddDiagonal { .. }));
    }

    #[test]
    fn isqrt_ceil_rounds_up() {
        assert_eq!(isqrt_ceil(0), 0);
        assert_eq!(isqrt_ceil(9), 3);
        assert_eq!(isqrt_ceil(10), 4);
        assert_eq!(isqrt_ceil(15), 4);
        assert_eq!(isqrt_ceil(16), 4);
    }
}
