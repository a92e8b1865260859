//! Dense symmetric linear algebra: factorizations, standard and generalized
//! eigensolvers, Woodbury solves and matrix-level spectral bounds.

mod bounds;
mod cholesky;
mod dense;
mod eigen;
mod ordering;
mod sparse;
mod woodbury;

#[cfg(test)]
pub(crate) mod testing;

pub use bounds::{condition_number, extreme_ratio, gershgorin_max, pair_condition};
pub use cholesky::{cholesky, CholeskyFactor, PermutedCholesky, PIVOT_RTOL};
pub use dense::{axpy, dot, norm2, DenseMatrix, SymMatrix};
pub use eigen::{
    generalized_eig, generalized_eigvals, generalized_eigvals_refined, max_residual,
    reduce_to_standard, refine_low_eigenvalues, sym_eig, sym_eigvals, EigDecomposition,
    Normalization,
};
pub use ordering::reverse_cuthill_mckee;
pub use sparse::{compensated_dot, CsrMatrix};
pub use woodbury::{woodbury_solve, LowRankUpdate, WoodburySolver};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LinalgError {
    #[error("matrix is not positive definite (pivot {pivot} failed)")]
    NotPositiveDefinite { pivot: usize },
    #[error("eigenvalue iteration did not converge for index {index}")]
    NoConvergence { index: usize },
    #[error("Woodbury core system is singular at pivot {index}")]
    SingularCore { index: usize },
    #[error("matrix is not symmetric at ({row}, {col})")]
    NotSymmetric { row: usize, col: usize },
    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("update rank {rank} must be smaller than the order {order}")]
    RankTooLarge { rank: usize, order: usize },
}

/// Symmetric pair `(A, B)`. Positive definiteness of `B` is verified by the
/// solvers that need it (Cholesky), not at construction.
#[derive(Clone, Debug)]
pub struct MatrixPair {
    a: SymMatrix,
    b: SymMatrix,
}

impl MatrixPair {
    pub fn new(a: SymMatrix, b: SymMatrix) -> Result<Self, LinalgError> {
        if a.order() != b.order() {
            return Err(LinalgError::DimensionMismatch {
                expected: a.order(),
                actual: b.order(),
            });
        }
        Ok(Self { a, b })
    }

    pub fn a(&self) -> &SymMatrix {
        &self.a
    }

    pub fn b(&self) -> &SymMatrix {
        &self.b
    }

    pub fn order(&self) -> usize {
        self.a.order()
    }

    pub fn into_parts(self) -> (SymMatrix, SymMatrix) {
        (self.a, self.b)
    }
}
