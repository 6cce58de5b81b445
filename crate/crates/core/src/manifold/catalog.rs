//! Built-in manifold catalog plus JSON manifest ingestion.

use std::collections::BTreeMap;

use serde::Deserialize;
use thiserror::Error;

use super::{GeometricFlags, ManifoldModel, ModelError, Provenance, SymplecticData};
use crate::lattice::{CohomologyClass, IntersectionForm};

#[derive(Debug, Error)]
pub enum ManifestError {
    #[error("manifest parse error at line {line}: {detail}")]
    Parse { line: usize, detail: String },
    #[error("duplicate manifold name `{0}`")]
    DuplicateName(String),
    #[error("invariant violation for `{name}`: {detail}")]
    InvariantViolation { name: String, detail: String },
}

/// Read-only name-to-model map; starts from the built-ins.
#[derive(Debug, Clone)]
pub struct Catalog {
    entries: BTreeMap<String, ManifoldModel>,
}

impl Catalog {
    /// The five built-ins: S4, CP2, CP2bar, S2xS2 and the K3 surface.
    pub fn builtin() -> Self {
        let mut entries = BTreeMap::new();
        for model in builtin_models() {
            entries.insert(model.name().to_string(), model);
        }
        Self { entries }
    }

    /// Built-ins extended by the manifest entries; duplicates rejected.
    pub fn load(manifest: &str) -> Result<Self, ManifestError> {
        let mut catalog = Self::builtin();
        if manifest.trim().is_empty() {
            return Ok(catalog);
        }
        let parsed: Manifest = serde_json::from_str(manifest).map_err(|e| ManifestError::Parse {
            line: e.line(),
            detail: e.to_string(),
        })?;
        for entry in parsed.manifolds {
            let model = entry.into_model()?;
            if catalog.entries.contains_key(model.name()) {
                return Err(ManifestError::DuplicateName(model.name().to_string()));
            }
            catalog.entries.insert(model.name().to_string(), model);
        }
        Ok(catalog)
    }

    pub fn lookup(&self, name: &str) -> Option<&ManifoldModel> {
        self.entries.get(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(|s| s.as_str())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

fn builtin_models() -> Vec<ManifoldModel> {
    let s4 = ManifoldModel::new(
        "S4",
        0,
        IntersectionForm::new(vec![]).expect("empty form"),
        GeometricFlags {
            simply_connected: true,
            spin: true,
            kahler: false,
            symplectic: false,
            psc: true,
            symplectic_data: None,
        },
        Provenance::Catalog,
    )
    .expect("S4 invariants");

    let cp2 = ManifoldModel::new(
        "CP2",
        0,
        IntersectionForm::diagonal(&[1]).expect("unimodular"),
        GeometricFlags {
            simply_connected: true,
            spin: false,
            kahler: true,
            symplectic: true,
            psc: true,
            symplectic_data: Some(SymplecticData {
                canonical_class: CohomologyClass::new(vec![-3]),
                symplectic_class: CohomologyClass::new(vec![1]),
            }),
        },
        Provenance::Catalog,
    )
    .expect("CP2 invariants");

    let cp2bar = ManifoldModel::new(
        "CP2bar",
        0,
        IntersectionForm::diagonal(&[-1]).expect("unimodular"),
        GeometricFlags {
            simply_connected: true,
            spin: false,
            kahler: false,
            symplectic: false,
            psc: true,
            symplectic_data: None,
        },
        Provenance::Catalog,
    )
    .expect("CP2bar invariants");

    let s2xs2 = ManifoldModel::new(
        "S2xS2",
        0,
        IntersectionForm::hyperbolic(),
        GeometricFlags {
            simply_connected: true,
            spin: true,
            kahler: true,
            symplectic: true,
            psc: true,
            symplectic_data: Some(SymplecticData {
                canonical_class: CohomologyClass::new(vec![-2, -2]),
                symplectic_class: CohomologyClass::new(vec![1, 1]),
            }),
        },
        Provenance::Catalog,
    )
    .expect("S2xS2 invariants");

    // 2(-E8) + 3H, basis ordered E8 blocks first; omega sits in the first H
    let k3_form = IntersectionForm::direct_sum(&[
        IntersectionForm::e8().reverse_orientation(),
        IntersectionForm::e8().reverse_orientation(),
        IntersectionForm::hyperbolic(),
        IntersectionForm::hyperbolic(),
        IntersectionForm::hyperbolic(),
    ]);
    let mut k3_omega = vec![0i64; 22];
    k3_omega[16] = 1;
    k3_omega[17] = 1;
    let k3 = ManifoldModel::new(
        "K3",
        0,
        k3_form,
        GeometricFlags {
            simply_connected: true,
            spin: true,
            kahler: true,
            symplectic: true,
            psc: false,
            symplectic_data: Some(SymplecticData {
                canonical_class: CohomologyClass::zero(22),
                symplectic_class: CohomologyClass::new(k3_omega),
            }),
        },
        Provenance::Catalog,
    )
    .expect("K3 invariants");

    vec![s4, cp2, cp2bar, s2xs2, k3]
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Manifest {
    manifolds: Vec<ManifestEntry>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ManifestEntry {
    name: String,
    b1: u32,
    form: Vec<Vec<i64>>,
    flags: ManifestFlags,
    #[serde(default)]
    symplectic_data: Option<ManifestSymplecticData>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ManifestFlags {
    spin: bool,
    kahler: bool,
    symplectic: bool,
    psc: bool,
    simply_connected: bool,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ManifestSymplecticData {
    #[serde(rename = "K")]
    k: Vec<i64>,
    omega: Vec<i64>,
}

impl ManifestEntry {
    fn into_model(self) -> Result<ManifoldModel, ManifestError> {
        let name = self.name.clone();
        let form = IntersectionForm::new(self.form).map_err(|e| {
            ManifestError::InvariantViolation { name: name.clone(), detail: e.to_string() }
        })?;
        let flags = GeometricFlags {
            simply_connected: self.flags.simply_connected,
            spin: self.flags.spin,
            kahler: self.flags.kahler,
            symplectic: self.flags.symplectic,
            psc: self.flags.psc,
            symplectic_data: self.symplectic_data.map(|d| SymplecticData {
                canonical_class: CohomologyClass::new(d.k),
                symplectic_class: CohomologyClass::new(d.omega),
            }),
        };
        ManifoldModel::new(name.clone(), self.b1, form, flags, Provenance::Manifest).map_err(
            |e: ModelError| ManifestError::InvariantViolation { name, detail: e.to_string() },
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_manifest_gives_builtins() {
        let catalog = Catalog::load("").unwrap();
        assert_eq!(catalog.len(), 5);
        assert!(catalog.lookup("S4").is_some());
        assert!(catalog.lookup("K3").is_some());
    }

    #[test]
    fn k3_profile() {
        let catalog = Catalog::builtin();
        let k3 = catalog.lookup("K3").unwrap();
        let s = k3.signature_data();
        assert_eq!((s.b2_plus, s.b2_minus, s.sigma), (3, 19, -16));
        assert_eq!(k3.euler_characteristic(), 24);
        assert!(k3.flags().spin && k3.flags().kahler);
    }

    #[test]
    fn rejects_redefined_builtin() {
        let manifest = r#"{"manifolds":[{"name":"CP2","b1":0,"form":[[1]],
            "flags":{"spin":false,"kahler":false,"symplectic":false,"psc":false,"simply_connected":true}}]}"#;
        assert!(matches!(
            Catalog::load(manifest),
            Err(ManifestError::DuplicateName(name)) if name == "CP2"
        ));
    }

    #[test]
    fn rejects_unknown_keys() {
        let manifest = r#"{"manifolds":[],"extra":1}"#;
        assert!(matches!(Catalog::load(manifest), Err(ManifestError::Parse { .. })));
    }

    #[test]
    fn rejects_invariant_violations() {
        // non-unimodular form
        let manifest = r#"{"manifolds":[{"name":"X","b1":0,"form":[[2]],
            "flags":{"spin":false,"kahler":false,"symplectic":false,"psc":false,"simply_connected":true}}]}"#;
        assert!(matches!(
            Catalog::load(manifest),
            Err(ManifestError::InvariantViolation { .. })
        ));
        // kahler without symplectic
        let manifest = r#"{"manifolds":[{"name":"X","b1":0,"form":[[1]],
            "flags":{"spin":false,"kahler":true,"symplectic":false,"psc":false,"simply_connected":true}}]}"#;
        assert!(matches!(
            Catalog::load(manifest),
            Err(ManifestError::InvariantViolation { .. })
        ));
    }

    #[test]
    fn accepts_valid_entry_with_symplectic_data() {
        let manifest = r#"{"manifolds":[{"name":"T4like","b1":2,"form":[[0,1],[1,0]],
            "flags":{"spin":true,"kahler":false,"symplectic":true,"psc":false,"simply_connected":false},
            "symplectic_data":{"K":[0,0],"omega":[1,1]}}]}"#;
        let catalog = Catalog::load(manifest).unwrap();
        let m = catalog.lookup("T4like").unwrap();
        assert_eq!(m.b1(), 2);
        assert_eq!(m.euler_characteristic(), 0);
    }
}
