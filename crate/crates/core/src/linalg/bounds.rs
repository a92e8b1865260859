//! Matrix-level spectral estimates.

use super::dense::SymMatrix;
use super::eigen::{generalized_eigvals, sym_eigvals};
use super::{LinalgError, MatrixPair};

/// Gershgorin upper bound on the largest eigenvalue: the maximum over rows of
/// the diagonal entry plus the off-diagonal absolute row sum.
pub fn gershgorin_max(m: &SymMatrix) -> f64 {
    (0..m.order())
        .map(|i| {
            let row = m.row(i);
            let off: f64 = row
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, v)| v.abs())
                .sum();
            row[i] + off
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Spectral condition number `λ_max / λ_min` of an SPD matrix.
pub fn condition_number(m: &SymMatrix) -> Result<f64, LinalgError> {
    extreme_ratio(&sym_eigvals(m)?)
}

/// Condition number `λ_n(A, B) / λ_1(A, B)` of a pair with SPD members.
pub fn pair_condition(p: &MatrixPair) -> Result<f64, LinalgError> {
    extreme_ratio(&generalized_eigvals(p)?)
}

/// Ratio of extreme eigenvalues; fails when the smallest is not positive.
pub fn extreme_ratio(ascending: &[f64]) -> Result<f64, LinalgError> {
    match (ascending.first(), ascending.last()) {
        (Some(&lo), Some(&hi)) if lo > 0.0 => Ok(hi / lo),
        (Some(_), Some(_)) => {
            let pivot = ascending.iter().position(|&v| v <= 0.0).unwrap_or(0);
            Err(LinalgError::NotPositiveDefinite { pivot })
        }
        _ => Err(LinalgError::DimensionMismatch {
            expected: 1,
            actual: 0,
        }),
    }
}
