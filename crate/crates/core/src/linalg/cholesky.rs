//! Envelope-aware dense Cholesky factorization.
//!
//! The factor lives in dense storage, but every loop is restricted to the row
//! envelope (first structurally nonzero column of each row). The envelope of
//! `L` equals the envelope of the input, so banded and diagonal matrices are
//! factored and solved at banded cost without a separate sparse code path.

use super::dense::{axpy, dot, DenseMatrix, SymMatrix};
use super::ordering::reverse_cuthill_mckee;
use super::LinalgError;

/// Relative pivot tolerance: a pivot `s` fails when `s <= PIVOT_RTOL * max_diag`.
pub const PIVOT_RTOL: f64 = 1e-13;

#[derive(Clone, Debug)]
pub struct CholeskyFactor {
    n: usize,
    first: Vec<usize>,
    l: Vec<f64>,
}

impl CholeskyFactor {
    pub fn new(m: &SymMatrix) -> Result<Self, LinalgError> {
        let n = m.order();
        let first: Vec<usize> = (0..n)
            .map(|i| m.row(i)[..i].iter().position(|&v| v != 0.0).unwrap_or(i))
            .collect();
        let max_diag = m.diagonal().into_iter().fold(0.0, f64::max);
        let tol = PIVOT_RTOL * max_diag;
        let mut l = vec![0.0; n * n];
        for i in 0..n {
            let fi = first[i];
            for j in fi..=i {
                let lo = fi.max(first[j]);
                let (head, tail) = l.split_at_mut(i * n);
                let row_i = &tail[..n];
                let s = if j < i {
                    let row_j = &head[j * n..(j + 1) * n];
                    m.get(i, j) - dot(&row_i[lo..j], &row_j[lo..j])
                } else {
                    m.get(i, i) - dot(&row_i[lo..i], &row_i[lo..i])
                };
                if j < i {
                    let ljj = head[j * n + j];
                    tail[j] = s / ljj;
                } else {
                    if !(s > tol) {
                        return Err(LinalgError::NotPositiveDefinite { pivot: i });
                    }
                    tail[i] = s.sqrt();
                }
            }
        }
        Ok(Self { n, first, l })
    }

    pub fn order(&self) -> usize {
        self.n
    }

    /// Sum of row envelope widths (including the diagonal).
    pub fn envelope_size(&self) -> usize {
        self.first.iter().enumerate().map(|(i, &f)| i - f + 1).sum()
    }

    #[inline]
    fn row(&self, i: usize) -> &[f64] {
        &self.l[i * self.n..(i + 1) * self.n]
    }

    /// The lower-triangular factor as a dense matrix.
    pub fn lower(&self) -> DenseMatrix {
        DenseMatrix::from_row_major(self.n, self.n, self.l.clone())
    }

    /// Solves `L y = b` in place.
    pub fn forward_in_place(&self, b: &mut [f64]) {
        for i in 0..self.n {
            let f = self.first[i];
            let row = self.row(i);
            let s = b[i] - dot(&row[f..i], &b[f..i]);
            b[i] = s / row[i];
        }
    }

    /// Solves `Lᵀ x = y` in place.
    pub fn backward_in_place(&self, y: &mut [f64]) {
        for j in (0..self.n).rev() {
            let row = self.row(j);
            let xj = y[j] / row[j];
            y[j] = xj;
            let f = self.first[j];
            if xj != 0.0 {
                axpy(-xj, &row[f..j], &mut y[f..j]);
            }
        }
    }

    pub fn solve_in_place(&self, b: &mut [f64]) {
        self.forward_in_place(b);
        self.backward_in_place(b);
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        x
    }

    /// Computes `L⁻¹ A L⁻ᵀ` for symmetric `A`, the standard-form reduction of
    /// the pair `(A, L Lᵀ)`. Works row-wise so every inner loop is contiguous.
    pub fn congruence_inverse(&self, a: &SymMatrix) -> SymMatrix {
        let n = self.n;
        assert_eq!(a.order(), n);
        // Y = L⁻¹ A, one row at a time
        let mut y = a.as_slice().to_vec();
        self.forward_rows(&mut y);
        // C = L⁻¹ Yᵀ
        let mut yt = vec![0.0; n * n];
        transpose_into(&y, &mut yt, n);
        drop(y);
        self.forward_rows(&mut yt);
        SymMatrix::from_square_buffer_symmetrized(n, yt)
    }

    /// Row-oriented forward substitution `X ← L⁻¹ X` for a row-major n×n buffer.
    fn forward_rows(&self, x: &mut [f64]) {
        let n = self.n;
        for i in 0..n {
            let f = self.first[i];
            let (done, rest) = x.split_at_mut(i * n);
            let xi = &mut rest[..n];
            let li = self.row(i);
            for k in f..i {
                let c = li[k];
                if c != 0.0 {
                    axpy(-c, &done[k * n..(k + 1) * n], xi);
                }
            }
            let inv = 1.0 / li[i];
            xi.iter_mut().for_each(|v| *v *= inv);
        }
    }

    /// Computes `x = L⁻ᵀ y` for each row `y` of a row-major buffer of `count` rows.
    pub(crate) fn backward_rows(&self, rows: &mut [f64], count: usize) {
        for r in 0..count {
            self.backward_in_place(&mut rows[r * self.n..(r + 1) * self.n]);
        }
    }
}

/// Cholesky factor of a symmetrically permuted matrix, `P A Pᵀ = L Lᵀ`, with
/// the permutation chosen by reverse Cuthill–McKee when it shrinks the envelope.
#[derive(Clone, Debug)]
pub struct PermutedCholesky {
    perm: Option<Vec<usize>>,
    factor: CholeskyFactor,
}

impl PermutedCholesky {
    pub fn new(m: &SymMatrix) -> Result<Self, LinalgError> {
        let perm = reverse_cuthill_mckee(m);
        let natural = envelope_of(m);
        let permuted = m.permuted(&perm);
        if envelope_of(&permuted) < natural {
            let factor = CholeskyFactor::new(&permuted).map_err(|e| match e {
                LinalgError::NotPositiveDefinite { pivot } => {
                    LinalgError::NotPositiveDefinite { pivot: perm[pivot] }
                }
                other => other,
            })?;
            Ok(Self {
                perm: Some(perm),
                factor,
            })
        } else {
            Ok(Self {
                perm: None,
                factor: CholeskyFactor::new(m)?,
            })
        }
    }

    pub fn factor(&self) -> &CholeskyFactor {
        &self.factor
    }

    pub fn permutation(&self) -> Option<&[usize]> {
        self.perm.as_deref()
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x, &mut vec![0.0; b.len()]);
        x
    }

    /// Solves in place; `scratch` must have the system order.
    pub fn solve_in_place(&self, b: &mut [f64], scratch: &mut [f64]) {
        match &self.perm {
            None => self.factor.solve_in_place(b),
            Some(p) => {
                for (s, &pi) in scratch.iter_mut().zip(p) {
                    *s = b[pi];
                }
                self.factor.solve_in_place(scratch);
                for (&s, &pi) in scratch.iter().zip(p) {
                    b[pi] = s;
                }
            }
        }
    }
}

fn envelope_of(m: &SymMatrix) -> usize {
    (0..m.order())
        .map(|i| i + 1 - m.row(i)[..i].iter().position(|&v| v != 0.0).unwrap_or(i))
        .sum()
}

pub(crate) fn transpose_into(src: &[f64], dst: &mut [f64], n: usize) {
    const B: usize = 32;
    for ib in (0..n).step_by(B) {
        for jb in (0..n).step_by(B) {
            for i in ib..(ib + B).min(n) {
                for j in jb..(jb + B).min(n) {
                    dst[j * n + i] = src[i * n + j];
                }
            }
        }
    }
}

/// Cholesky factorization `m = L Lᵀ`, returning the lower-triangular factor.
pub fn cholesky(m: &SymMatrix) -> Result<DenseMatrix, LinalgError> {
    Ok(CholeskyFactor::new(m)?.lower())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::testing::random_spd;

    fn reconstruct(l: &DenseMatrix) -> DenseMatrix {
        l.matmul(&l.transpose())
    }

    #[test]
    fn identity_factor_is_identity() {
        let l = cholesky(&SymMatrix::identity(3)).unwrap();
        assert_eq!(l, DenseMatrix::identity(3));
    }

    #[test]
    fn diagonal_square_roots() {
        let l = cholesky(&SymMatrix::from_diagonal(&[4.0, 9.0])).unwrap();
        assert_eq!(l[(0, 0)], 2.0);
        assert_eq!(l[(1, 1)], 3.0);
        assert_eq!(l[(1, 0)], 0.0);
    }

    #[test]
    fn random_spd_reconstructs() {
        let m = random_spd(6, 7);
        let l = cholesky(&m).unwrap();
        let diff = reconstruct(&l).frobenius_norm_diff(&m.to_dense());
        assert!(diff / m.frobenius_norm() <= 1e-12, "relative error {diff}");
        for i in 0..6 {
            for j in i + 1..6 {
                assert_eq!(l[(i, j)], 0.0);
            }
        }
    }

    #[test]
    fn indefinite_reports_first_failing_pivot() {
        let m = SymMatrix::from_lower_fn(3, |i, j| match (i, j) {
            (0, 0) => 1.0,
            (1, 0) => 2.0,
            (1, 1) => 1.0,
            (2, 2) => 1.0,
            _ => 0.0,
        });
        assert!(matches!(
            CholeskyFactor::new(&m),
            Err(LinalgError::NotPositiveDefinite { pivot: 1 })
        ));
        let singular = SymMatrix::from_diagonal(&[1.0, 0.0]);
        assert!(matches!(
            cholesky(&singular),
            Err(LinalgError::NotPositiveDefinite { pivot: 1 })
        ));
    }

    #[test]
    fn banded_solve_matches_dense_residual() {
        // tridiagonal SPD with a bad natural ordering, solved through the permuted path
        let n = 40;
        let perm: Vec<usize> = (0..n).map(|i| (i * 17) % n).collect();
        let tri = SymMatrix::from_lower_fn(n, |i, j| {
            if i == j {
                4.0
            } else if i == j + 1 {
                -1.0
            } else {
                0.0
            }
        });
        let scrambled = tri.permuted(&perm);
        let pc = PermutedCholesky::new(&scrambled).unwrap();
        assert!(pc.factor().envelope_size() < 3 * n);
        let b: Vec<f64> = (0..n).map(|i| (i as f64).sin()).collect();
        let x = pc.solve(&b);
        let r = scrambled.mul_vec(&x);
        for (ri, bi) in r.iter().zip(&b) {
            assert!((ri - bi).abs() < 1e-12);
        }
    }

    #[test]
    fn congruence_inverse_matches_explicit() {
        let b = random_spd(5, 3);
        let a = random_spd(5, 4);
        let f = CholeskyFactor::new(&b).unwrap();
        let c = f.congruence_inverse(&a);
        // check L C Lᵀ = A
        let l = f.lower();
        let back = l.matmul(&c.to_dense()).matmul(&l.transpose());
        assert!(back.frobenius_norm_diff(&a.to_dense()) < 1e-12 * a.frobenius_norm());
    }

    impl DenseMatrix {
        fn frobenius_norm_diff(&self, other: &DenseMatrix) -> f64 {
            self.as_slice()
                .iter()
                .zip(other.as_slice())
                .map(|(a, b)| (a - b).powi(2))
                .sum::<f64>()
                .sqrt()
        }
    }
}
