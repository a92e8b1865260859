//! Diagonal approximations of a consistent mass matrix.

use super::FemError;
use crate::linalg::SymMatrix;

/// Row-sum lumping: `dᵢ = Σⱼ mᵢⱼ`.
pub fn lump_row_sum(m: &SymMatrix) -> Result<Vec<f64>, FemError> {
    let d: Vec<f64> = (0..m.order()).map(|i| m.row(i).iter().sum()).collect();
    check_positive(&d)?;
    Ok(d)
}

/// HRZ (diagonal scaling) lumping. The dofs are split into `components`
/// contiguous blocks; within each block the diagonal is rescaled so that the
/// block's total mass `Σᵢⱼ mᵢⱼ` is preserved.
pub fn lump_hrz(m: &SymMatrix, components: usize) -> Result<Vec<f64>, FemError> {
    let n = m.order();
    if components == 0 || n % components != 0 {
        return Err(FemError::DimensionMismatch {
            expected: components.max(1),
            actual: n,
        });
    }
    let size = n / components;
    let mut d = m.diagonal();
    for c in 0..components {
        let range = c * size..(c + 1) * size;
        let total: f64 = range
            .clone()
            .map(|i| m.row(i)[range.clone()].iter().sum::<f64>())
            .sum();
        let diag: f64 = d[range.clone()].iter().sum();
        for v in &mut d[range] {
            *v *= total / diag;
        }
    }
    check_positive(&d)?;
    Ok(d)
}

fn check_positive(d: &[f64]) -> Result<(), FemError> {
    match d.iter().position(|&v| !(v > 0.0)) {
        Some(index) => Err(FemError::NegativeLumpedEntry {
            index,
            value: d[index],
        }),
        None => Ok(()),
    }
}
