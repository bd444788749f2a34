//! Equilibrium measures and strong asymptotics for multiple orthogonal
//! polynomials attached to the equispaced external source model.
//!
//! The pipeline is: pick a [`FieldSpec`], build [`EquilibriumData`] with
//! [`EquilibriumData::new`], then evaluate asymptotic formulas from
//! [`asympt`] and compare against exact finite-n values from [`oracle`].

pub mod asympt;
pub mod equilibrium;
pub mod error;
pub mod jmap;
pub mod numerics;
pub mod oracle;

pub use equilibrium::{EquilibriumData, FieldSpec};
pub use error::{Error, Result};
pub use jmap::MapParams;
pub use num_complex::Complex64;
