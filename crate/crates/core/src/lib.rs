pub mod cliffkern;
pub mod lattice;
pub mod manifold;
pub mod rules;
pub mod selftest;
pub mod surgery;
pub mod swarith;
pub mod twistor;

pub use lattice::{CohomologyClass, IntersectionForm, LatticeError, SignatureData};
pub use manifold::{Catalog, GeometricFlags, ManifoldModel, WuVerdict};
pub use swarith::SpinCStructure;
