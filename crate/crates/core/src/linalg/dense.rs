//! Dense row-major storage for symmetric and general real matrices.

use std::fmt;
use std::ops::{Index, IndexMut};

use super::LinalgError;

/// General dense matrix, row-major.
#[derive(Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        assert_eq!(
            data.len(),
            rows * cols,
            "data length must equal rows * cols"
        );
        Self { rows, cols, data }
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns(columns: &[Vec<f64>]) -> Self {
        let cols = columns.len();
        let rows = columns.first().map_or(0, Vec::len);
        Self::from_fn(rows, cols, |i, j| columns[j][i])
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows)
            .map(|i| self.data[i * self.cols + j])
            .collect()
    }

    pub fn transpose(&self) -> DenseMatrix {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows).map(|i| dot(self.row(i), x)).collect()
    }

    /// Computes `selfᵀ x`.
    pub fn tr_mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.rows);
        let mut y = vec![0.0; self.cols];
        for (i, &xi) in x.iter().enumerate() {
            if xi != 0.0 {
                axpy(xi, self.row(i), &mut y);
            }
        }
        y
    }

    pub fn matmul(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = DenseMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let row = self.row(i);
            let out_row = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for (k, &a) in row.iter().enumerate() {
                if a != 0.0 {
                    axpy(a, other.row(k), out_row);
                }
            }
        }
        out
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

impl Index<(usize, usize)> for DenseMatrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for DenseMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for DenseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "DenseMatrix {}x{}", self.rows, self.cols)?;
        for i in 0..self.rows.min(12) {
            writeln!(f, "  {:?}", &self.row(i)[..self.cols.min(12)])?;
        }
        Ok(())
    }
}

/// Dense symmetric matrix. Both triangles are stored and every mutator writes
/// the mirrored entry, so `m[(i, j)] == m[(j, i)]` holds bit-for-bit.
#[derive(Clone, PartialEq)]
pub struct SymMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_diagonal(&vec![1.0; n])
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n);
        for (i, &d) in diag.iter().enumerate() {
            m.data[i * n + i] = d;
        }
        m
    }

    /// Builds from the lower triangle produced by `f(i, j)` with `j <= i`.
    pub fn from_lower_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..=i {
                let v = f(i, j);
                m.data[i * n + j] = v;
                m.data[j * n + i] = v;
            }
        }
        m
    }

    /// Checked construction from a full row-major array; symmetry must hold exactly.
    pub fn from_row_major(n: usize, data: Vec<f64>) -> Result<Self, LinalgError> {
        if data.len() != n * n {
            return Err(LinalgError::DimensionMismatch {
                expected: n * n,
                actual: data.len(),
            });
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(LinalgError::NonFinite {
                row: pos / n,
                col: pos % n,
            });
        }
        for i in 0..n {
            for j in 0..i {
                if data[i * n + j] != data[j * n + i] {
                    return Err(LinalgError::NotSymmetric { row: i, col: j });
                }
            }
        }
        Ok(Self { n, data })
    }

    /// Symmetrizes a general square matrix as `(a + aᵀ) / 2`.
    pub fn from_dense_symmetrized(a: &DenseMatrix) -> Self {
        assert_eq!(a.nrows(), a.ncols());
        Self::from_lower_fn(a.nrows(), |i, j| 0.5 * (a[(i, j)] + a[(j, i)]))
    }

    /// Takes ownership of a square buffer and symmetrizes it in place.
    pub(crate) fn from_square_buffer_symmetrized(n: usize, mut data: Vec<f64>) -> Self {
        for i in 0..n {
            for j in 0..i {
                let v = 0.5 * (data[i * n + j] + data[j * n + i]);
                data[i * n + j] = v;
                data[j * n + i] = v;
            }
        }
        Self { n, data }
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
        self.data[j * self.n + i] = v;
    }

    /// Adds `v` at `(i, j)` and its mirror (once on the diagonal).
    pub fn add_at(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] += v;
        if i != j {
            self.data[j * self.n + i] += v;
        }
    }

    /// Scatters a full symmetric block through `map` (injective), so mirrored
    /// entries receive identical sums in identical order.
    pub(crate) fn add_block(&mut self, map: &[usize], block: &SymMatrix) {
        let n = self.n;
        for (a, &ga) in map.iter().enumerate() {
            let src = block.row(a);
            let dst = &mut self.data[ga * n..(ga + 1) * n];
            for (&gb, &v) in map.iter().zip(src) {
                dst[gb] += v;
            }
        }
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.data[i * self.n + i]).collect()
    }

    /// True when every off-diagonal entry is exactly zero.
    pub fn is_diagonal(&self) -> bool {
        (0..self.n).all(|i| {
            self.row(i)
                .iter()
                .enumerate()
                .all(|(j, &v)| j == i || v == 0.0)
        })
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n);
        (0..self.n).map(|i| dot(self.row(i), x)).collect()
    }

    pub fn quadratic_form(&self, x: &[f64]) -> f64 {
        dot(x, &self.mul_vec(x))
    }

    pub fn scaled(&self, s: f64) -> SymMatrix {
        Self {
            n: self.n,
            data: self.data.iter().map(|v| v * s).collect(),
        }
    }

    /// `a * self + b * other`.
    pub fn lin_comb(&self, a: f64, other: &SymMatrix, b: f64) -> SymMatrix {
        assert_eq!(self.n, other.n);
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(x, y)| a * x + b * y)
            .collect();
        Self { n: self.n, data }
    }

    pub fn add(&self, other: &SymMatrix) -> SymMatrix {
        self.lin_comb(1.0, other, 1.0)
    }

    pub fn sub(&self, other: &SymMatrix) -> SymMatrix {
        self.lin_comb(1.0, other, -1.0)
    }

    /// `self + V diag(s) Vᵀ`.
    pub fn add_low_rank(&self, v: &DenseMatrix, s: &[f64]) -> SymMatrix {
        assert_eq!(v.nrows(), self.n);
        assert_eq!(v.ncols(), s.len());
        let mut data = self.data.clone();
        let n = self.n;
        let mut scaled = vec![0.0; s.len()];
        for i in 0..n {
            let vi = v.row(i);
            for (t, (&a, &b)) in scaled.iter_mut().zip(vi.iter().zip(s)) {
                *t = a * b;
            }
            for j in 0..=i {
                let upd = dot(&scaled, v.row(j));
                data[i * n + j] += upd;
            }
        }
        for i in 0..n {
            for j in 0..i {
                data[j * n + i] = data[i * n + j];
            }
        }
        Self { n, data }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Max row sum of absolute values; an upper bound on the spectral norm.
    pub fn inf_norm(&self) -> f64 {
        (0..self.n)
            .map(|i| self.row(i).iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Principal submatrix on the given (sorted or unsorted) index set.
    pub fn submatrix(&self, indices: &[usize]) -> SymMatrix {
        Self::from_lower_fn(indices.len(), |i, j| self.get(indices[i], indices[j]))
    }

    /// Symmetric permutation `P A Pᵀ` with `out[(i, j)] = self[(perm[i], perm[j])]`.
    pub fn permuted(&self, perm: &[usize]) -> SymMatrix {
        assert_eq!(perm.len(), self.n);
        let n = self.n;
        let mut data = vec![0.0; n * n];
        for (i, &pi) in perm.iter().enumerate() {
            let src = self.row(pi);
            let dst = &mut data[i * n..(i + 1) * n];
            for (d, &pj) in dst.iter_mut().zip(perm) {
                *d = src[pj];
            }
        }
        Self { n, data }
    }

    pub fn to_dense(&self) -> DenseMatrix {
        DenseMatrix::from_row_major(self.n, self.n, self.data.clone())
    }
}

impl Index<(usize, usize)> for SymMatrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.n + j]
    }
}

impl fmt::Debug for SymMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "SymMatrix order {}", self.n)?;
        for i in 0..self.n.min(12) {
            writeln!(f, "  {:?}", &self.row(i)[..self.n.min(12)])?;
        }
        Ok(())
    }
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    // four accumulators so the loop vectorizes without reassociation flags
    let mut acc = [0.0f64; 4];
    let chunks = a.len() / 4;
    for c in 0..chunks {
        let i = 4 * c;
        acc[0] += a[i] * b[i];
        acc[1] += a[i + 1] * b[i + 1];
        acc[2] += a[i + 2] * b[i + 2];
        acc[3] += a[i + 3] * b[i + 3];
    }
    let mut s = (acc[0] + acc[1]) + (acc[2] + acc[3]);
    for i in 4 * chunks..a.len() {
        s += a[i] * b[i];
    }
    s
}

/// `y += a * x`
#[inline]
pub fn axpy(a: f64, x: &[f64], y: &mut [f64]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, &xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

pub fn norm2(x: &[f64]) -> f64 {
    dot(x, x).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mirrored_writes_keep_symmetry() {
        let mut m = SymMatrix::zeros(3);
        m.add_at(0, 2, 1.5);
        m.add_at(2, 0, 0.5);
        m.add_at(1, 1, 3.0);
        assert_eq!(m[(0, 2)], 2.0);
        assert_eq!(m[(2, 0)], 2.0);
        assert_eq!(m[(1, 1)], 3.0);
    }

    #[test]
    fn checked_constructor_rejects_asymmetry() {
        let err = SymMatrix::from_row_major(2, vec![1.0, 2.0, 2.5, 1.0]).unwrap_err();
        assert!(matches!(err, LinalgError::NotSymmetric { row: 1, col: 0 }));
        let err = SymMatrix::from_row_major(2, vec![1.0, f64::NAN, f64::NAN, 1.0]).unwrap_err();
        assert!(matches!(err, LinalgError::NonFinite { .. }));
    }

    #[test]
    fn low_rank_update_matches_explicit_product() {
        let base = SymMatrix::from_diagonal(&[1.0, 2.0, 3.0]);
        let v = DenseMatrix::from_row_major(3, 2, vec![1.0, 0.0, 2.0, 1.0, 0.0, -1.0]);
        let s = [2.0, 0.5];
        let m = base.add_low_rank(&v, &s);
        for i in 0..3 {
            for j in 0..3 {
                let expected =
                    base[(i, j)] + 2.0 * v[(i, 0)] * v[(j, 0)] + 0.5 * v[(i, 1)] * v[(j, 1)];
                assert!((m[(i, j)] - expected).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn permutation_roundtrip() {
        let m = SymMatrix::from_lower_fn(4, |i, j| (i * 4 + j) as f64);
        let perm = [2, 0, 3, 1];
        let mut inv = [0; 4];
        for (i, &p) in perm.iter().enumerate() {
            inv[p] = i;
        }
        assert_eq!(m.permuted(&perm).permuted(&inv), m);
    }
}
