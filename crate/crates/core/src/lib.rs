//! Cocycle deformation of finite-group operator algebras: twisted group
//! algebras, coactions and crossed products, ω-deformations, duality
//! isomorphisms, and K₀ block data, all certified numerically.

pub mod coaction;
pub mod cocycle;
pub mod crossed;
pub mod deform;
pub mod error;
pub mod ktheory;
pub mod group;
pub mod report;
pub mod repstack;
pub mod scalar;
pub mod subspace;
pub mod tensor;

pub use error::{Error, Result};
pub use group::{check_group_axioms, coset_section, CosetSection, FiniteGroup, Subgroup};
pub use report::{Check, Report, Status};
pub use scalar::{CMat, CVec, Cx, Real};

/// Concrete f64 aliases; the CLI and tests use these.
pub type Mat = CMat<f64>;
pub type Vec64 = CVec<f64>;
pub type C64 = Cx<f64>;
