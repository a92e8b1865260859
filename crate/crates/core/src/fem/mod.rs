//! Trilinear hexahedral elements, lumping, structured meshes and assembly.
//!
//! Element dofs are component-blocked: local index `c * 8 + a` for component
//! `c` of node `a`. Global dofs follow the same rule with `c * nodes + node`,
//! so `I₃ ⊗ ·` structures stay block-diagonal after assembly.

mod assembly;
mod hex8;
mod lumping;
mod material;
mod mesh;

use thiserror::Error;

use crate::linalg::LinalgError;

pub use assembly::{
    assemble, assemble_diagonal, assemble_local, element_blocks, free_dofs, BlockMatrix,
    ElementBlock, FeModel,
};
pub use hex8::{
    element_mass, hex8_consistent_mass, hex8_stiffness, rigid_body_modes, Hex8Geometry,
    NODE_NATURAL,
};
pub use lumping::{lump_hrz, lump_row_sum};
pub use material::Material;
pub use mesh::{build_structured_mesh, Mesh};

/// Nodes per element.
pub const NODES: usize = 8;
/// Dofs per element.
pub const ELEMENT_DOFS: usize = 24;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FemError {
    #[error("invalid material: {field} = {value}")]
    InvalidMaterial { field: &'static str, value: f64 },
    #[error("non-positive Jacobian determinant {det:e} at quadrature point {point}")]
    DegenerateJacobian { point: usize, det: f64 },
    #[error("lumped mass entry {index} is not positive ({value:e})")]
    NegativeLumpedEntry { index: usize, value: f64 },
    #[error("invalid node counts ({nx}, {ny}, {nz}); each must be at least 2")]
    InvalidCounts { nx: usize, ny: usize, nz: usize },
    #[error("invalid extents ({0}, {1}, {2})")]
    InvalidExtents(f64, f64, f64),
    #[error("element {element} refers to index {index} outside 0..{bound}")]
    IndexOutOfRange {
        element: usize,
        index: usize,
        bound: usize,
    },
    #[error("mesh text line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("expected {expected} entries, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}
