//! Scalings of the assembled pair: linear fractional transforms, the
//! polynomial pair and global deflation.

use std::sync::Arc;

use super::{DeflationMode, ScaledMass, ScalingError};
use crate::linalg::{
    CsrMatrix, DenseMatrix, EigDecomposition, LowRankUpdate, PermutedCholesky, SymMatrix,
};

/// `L(A, B) = (w₁₁A + w₂₁B, w₁₂A + w₂₂B)`. `K̄` is shared with the input when
/// the transform leaves it alone.
pub fn lft(
    k: &Arc<SymMatrix>,
    m: &SymMatrix,
    w: [[f64; 2]; 2],
) -> Result<(Arc<SymMatrix>, ScaledMass), ScalingError> {
    let [[w11, w12], [w21, w22]] = w;
    let det = w11 * w22 - w12 * w21;
    if det == 0.0 || !det.is_finite() {
        return Err(ScalingError::DegenerateLft { det });
    }
    let kbar = if w11 == 1.0 && w21 == 0.0 {
        Arc::clone(k)
    } else {
        Arc::new(k.lin_comb(w11, m, w21))
    };
    let mbar = if w12 == 0.0 {
        m.scaled(w22)
    } else {
        k.lin_comb(w12, m, w22)
    };
    PermutedCholesky::new(&mbar).map_err(|_| ScalingError::LostDefiniteness)?;
    let mbar = if mbar.is_diagonal() {
        ScaledMass::Diagonal(mbar.diagonal())
    } else {
        ScaledMass::Dense(mbar)
    };
    Ok((kbar, mbar))
}

/// Image of an eigenvalue under [`lft`].
pub fn lft_eigenvalue(w: [[f64; 2]; 2], lambda: f64) -> f64 {
    (w[0][0] * lambda + w[1][0]) / (w[0][1] * lambda + w[1][1])
}

/// `M̄ = M + c K M⁻¹ K` for a diagonal `M`.
pub fn polynomial_sms(k: &SymMatrix, m: &SymMatrix, c: f64) -> Result<ScaledMass, ScalingError> {
    if !m.is_diagonal() {
        return Err(ScalingError::NonDiagonalMass);
    }
    let d = m.diagonal();
    if c == 0.0 {
        return Ok(ScaledMass::Diagonal(d));
    }
    let n = k.order();
    let csr = CsrMatrix::from_sym(k);
    let mut data = vec![0.0; n * n];
    for i in 0..n {
        let row = &mut data[i * n..(i + 1) * n];
        let (li, vi) = csr.row(i);
        for (&l, &kil) in li.iter().zip(vi) {
            let s = c * kil / d[l];
            let (lj, vl) = csr.row(l);
            for (&j, &klj) in lj.iter().zip(vl) {
                row[j] += s * klj;
            }
        }
        row[i] += d[i];
    }
    Ok(ScaledMass::Dense(SymMatrix::from_lower_fn(n, |i, j| {
        0.5 * (data[i * n + j] + data[j * n + i])
    })))
}

/// Deflation of the top `r` eigenpairs of a `B`-orthonormal decomposition of
/// `(K, M)`: `M̄ = M + V g(D₂) Vᵀ` with `V = M U₂`.
pub fn global_deflation(
    m: &SymMatrix,
    eig: &EigDecomposition,
    rank: usize,
    mode: DeflationMode,
) -> Result<LowRankUpdate, ScalingError> {
    let n = m.order();
    if rank >= n.max(1) {
        return Err(ScalingError::RankTooLarge { rank, limit: n });
    }
    if eig.len() != n {
        return Err(ScalingError::DimensionMismatch {
            expected: n,
            actual: eig.len(),
        });
    }
    let lam = &eig.values;
    let core: Vec<f64> = match mode {
        DeflationMode::Shave if rank > 0 => lam[n - rank..]
            .iter()
            .map(|l| l / lam[n - rank - 1] - 1.0)
            .collect(),
        DeflationMode::Shave => Vec::new(),
        DeflationMode::Cutoff { alpha } => vec![alpha; rank],
    };
    let cols: Vec<Vec<f64>> = (n - rank..n).map(|k| m.mul_vec(&eig.vector(k))).collect();
    let factors = if rank == 0 {
        DenseMatrix::zeros(n, 0)
    } else {
        DenseMatrix::from_columns(&cols)
    };
    Ok(LowRankUpdate::new(m.clone(), factors, core)?)
}
