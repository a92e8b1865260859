//! Solves with `base + V S Vᵀ` through the Woodbury identity.

use super::cholesky::PermutedCholesky;
use super::dense::{dot, DenseMatrix, SymMatrix};
use super::LinalgError;

/// `base + factors · diag(core) · factorsᵀ`, with `base` SPD.
#[derive(Clone, Debug)]
pub struct LowRankUpdate {
    pub base: SymMatrix,
    pub factors: DenseMatrix,
    pub core: Vec<f64>,
}

impl LowRankUpdate {
    pub fn new(base: SymMatrix, factors: DenseMatrix, core: Vec<f64>) -> Result<Self, LinalgError> {
        if factors.nrows() != base.order() {
            return Err(LinalgError::DimensionMismatch {
                expected: base.order(),
                actual: factors.nrows(),
            });
        }
        if factors.ncols() != core.len() {
            return Err(LinalgError::DimensionMismatch {
                expected: factors.ncols(),
                actual: core.len(),
            });
        }
        if core.len() >= base.order().max(1) {
            return Err(LinalgError::RankTooLarge {
                rank: core.len(),
                order: base.order(),
            });
        }
        Ok(Self {
            base,
            factors,
            core,
        })
    }

    pub fn order(&self) -> usize {
        self.base.order()
    }

    pub fn rank(&self) -> usize {
        self.core.len()
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = self.base.mul_vec(x);
        let t = self.factors.tr_mul_vec(x);
        for (i, yi) in y.iter_mut().enumerate() {
            let row = self.factors.row(i);
            *yi += row
                .iter()
                .zip(&t)
                .zip(&self.core)
                .map(|((v, t), s)| v * t * s)
                .sum::<f64>();
        }
        y
    }

    /// Explicit dense matrix (for eigen-analysis of the scaled pair).
    pub fn to_dense(&self) -> SymMatrix {
        self.base.add_low_rank(&self.factors, &self.core)
    }
}

/// Prefactored Woodbury solver for repeated right-hand sides.
///
/// Uses `(B + V S Vᵀ)⁻¹ = B⁻¹ − B⁻¹V S (I + Vᵀ B⁻¹ V S)⁻¹ Vᵀ B⁻¹`, which needs
/// no inverse of `S` and so tolerates zero core entries.
#[derive(Clone, Debug)]
pub struct WoodburySolver {
    base: PermutedCholesky,
    /// `B⁻¹ V`, n×r.
    binv_v: DenseMatrix,
    factors: DenseMatrix,
    core: Vec<f64>,
    /// LU factors of the r×r core system with partial pivoting.
    lu: DenseMatrix,
    pivots: Vec<usize>,
}

impl WoodburySolver {
    pub fn new(update: &LowRankUpdate) -> Result<Self, LinalgError> {
        let base = PermutedCholesky::new(&update.base)?;
        let n = update.order();
        let r = update.rank();
        let mut cols = Vec::with_capacity(r);
        for j in 0..r {
            cols.push(base.solve(&update.factors.column(j)));
        }
        let binv_v = DenseMatrix::from_columns(&cols);
        let binv_v = if r == 0 {
            DenseMatrix::zeros(n, 0)
        } else {
            binv_v
        };
        // core system I + (Vᵀ B⁻¹ V) S
        let mut lu = DenseMatrix::from_fn(r, r, |i, j| {
            let g: f64 = (0..n)
                .map(|k| update.factors[(k, i)] * binv_v[(k, j)])
                .sum();
            g * update.core[j] + if i == j { 1.0 } else { 0.0 }
        });
        let scale = (0..r)
            .map(|i| lu.row(i).iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max);
        let pivots = lu_in_place(&mut lu, scale)?;
        Ok(Self {
            base,
            binv_v,
            factors: update.factors.clone(),
            core: update.core.clone(),
            lu,
            pivots,
        })
    }

    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let mut x = rhs.to_vec();
        let mut scratch = vec![0.0; rhs.len()];
        self.solve_in_place(&mut x, &mut scratch);
        x
    }

    pub fn solve_in_place(&self, rhs: &mut [f64], scratch: &mut [f64]) {
        self.base.solve_in_place(rhs, scratch);
        let r = self.core.len();
        if r == 0 {
            return;
        }
        // t = Vᵀ B⁻¹ rhs
        let mut t = self.factors.tr_mul_vec(rhs);
        lu_solve(&self.lu, &self.pivots, &mut t);
        for (tj, sj) in t.iter_mut().zip(&self.core) {
            *tj *= sj;
        }
        for (i, xi) in rhs.iter_mut().enumerate() {
            *xi -= dot(self.binv_v.row(i), &t);
        }
    }
}

fn lu_in_place(a: &mut DenseMatrix, scale: f64) -> Result<Vec<usize>, LinalgError> {
    let r = a.nrows();
    let mut piv: Vec<usize> = (0..r).collect();
    for k in 0..r {
        let p = (k..r)
            .max_by(|&i, &j| a[(i, k)].abs().total_cmp(&a[(j, k)].abs()))
            .unwrap();
        if a[(p, k)].abs() <= 1e-14 * scale.max(f64::MIN_POSITIVE) {
            return Err(LinalgError::SingularCore { index: k });
        }
        if p != k {
            piv.swap(p, k);
            for j in 0..r {
                let tmp = a[(p, j)];
                a[(p, j)] = a[(k, j)];
                a[(k, j)] = tmp;
            }
        }
        for i in k + 1..r {
            let f = a[(i, k)] / a[(k, k)];
            a[(i, k)] = f;
            for j in k + 1..r {
                let akj = a[(k, j)];
                a[(i, j)] -= f * akj;
            }
        }
    }
    Ok(piv)
}

fn lu_solve(lu: &DenseMatrix, piv: &[usize], b: &mut [f64]) {
    let r = lu.nrows();
    let mut y: Vec<f64> = piv.iter().map(|&p| b[p]).collect();
    for i in 0..r {
        for j in 0..i {
            y[i] -= lu[(i, j)] * y[j];
        }
    }
    for i in (0..r).rev() {
        for j in i + 1..r {
            y[i] -= lu[(i, j)] * y[j];
        }
        y[i] /= lu[(i, i)];
    }
    b.copy_from_slice(&y);
}

/// One-shot solve of `(base + V S Vᵀ) x = rhs`.
pub fn woodbury_solve(update: &LowRankUpdate, rhs: &[f64]) -> Result<Vec<f64>, LinalgError> {
    if rhs.len() != update.order() {
        return Err(LinalgError::DimensionMismatch {
            expected: update.order(),
            actual: rhs.len(),
        });
    }
    Ok(WoodburySolver::new(update)?.solve(rhs))
}
