//! Mass scaling laboratory for explicit structural dynamics.
//!
//! Builds trilinear hexahedral models, applies global and element-wise mass
//! scaling strategies, computes the resulting spectra with a dense
//! generalized eigensolver, evaluates eigenvalue / time-step / condition
//! bounds, and probes central-difference stability empirically.

pub mod analysis;
pub mod fem;
pub mod integrator;
pub mod linalg;
pub mod scaling;

/// Library version.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
