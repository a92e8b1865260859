//! Symmetric eigensolver: Householder tridiagonalization followed by the
//! implicit-shift QL iteration, plus the Cholesky reduction for pairs.

use super::cholesky::{transpose_into, PermutedCholesky};
use super::dense::{axpy, dot, norm2, DenseMatrix, SymMatrix};
use super::sparse::{compensated_dot, CsrMatrix};
use super::{LinalgError, MatrixPair};

/// QL sweeps allowed per eigenvalue before giving up.
const MAX_QL_ITERATIONS: usize = 60;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Normalization {
    UnitNorm,
    BOrthonormal,
}

/// Eigenvalues in ascending order with matching eigenvector columns.
#[derive(Clone, Debug)]
pub struct EigDecomposition {
    pub values: Vec<f64>,
    /// Column `k` is the eigenvector of `values[k]`.
    pub vectors: DenseMatrix,
    pub normalization: Normalization,
}

impl EigDecomposition {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn vector(&self, k: usize) -> Vec<f64> {
        self.vectors.column(k)
    }

    /// Columns `range` of the eigenvector matrix as an n×r matrix.
    pub fn vectors_range(&self, range: std::ops::Range<usize>) -> DenseMatrix {
        let r = range.len();
        DenseMatrix::from_fn(self.vectors.nrows(), r, |i, j| {
            self.vectors[(i, range.start + j)]
        })
    }
}

#[derive(Clone)]
struct Tridiagonal {
    diag: Vec<f64>,
    /// `off[k]` couples `k` and `k + 1`; the last entry is zero.
    off: Vec<f64>,
}

/// Reduces the symmetric matrix held in `a` (row-major, both triangles) to
/// tridiagonal form. On return the upper part of row `k` holds the Householder
/// vector of step `k` and `taus[k]` its scale.
fn tridiagonalize(a: &mut [f64], n: usize) -> (Tridiagonal, Vec<f64>) {
    let mut diag = vec![0.0; n];
    let mut off = vec![0.0; n];
    let mut taus = vec![0.0; n];
    let mut p = vec![0.0; n];
    for k in 0..n.saturating_sub(1) {
        let m = n - k - 1;
        let (head, trailing) = a.split_at_mut((k + 1) * n);
        let row_k = &mut head[k * n..];
        diag[k] = row_k[k];
        let x = &mut row_k[k + 1..n];
        let sigma = dot(&x[1..], &x[1..]);
        if sigma == 0.0 {
            off[k] = x[0];
            taus[k] = 0.0;
            continue;
        }
        let x0 = x[0];
        let norm = (x0 * x0 + sigma).sqrt();
        let beta = if x0 >= 0.0 { -norm } else { norm };
        let tau = (beta - x0) / beta;
        let scale = 1.0 / (x0 - beta);
        x[0] = 1.0;
        x[1..].iter_mut().for_each(|v| *v *= scale);
        off[k] = beta;
        taus[k] = tau;
        let v = &*x;

        // p = tau * S v using the upper triangle of the trailing block
        let p = &mut p[..m];
        p.fill(0.0);
        for i in 0..m {
            let row = &trailing[i * n + k + 1 + i..(i + 1) * n];
            let vi = v[i];
            p[i] += row[0] * vi + dot(&row[1..], &v[i + 1..]);
            if vi != 0.0 {
                axpy(vi, &row[1..], &mut p[i + 1..]);
            }
        }
        p.iter_mut().for_each(|t| *t *= tau);
        let kfac = 0.5 * tau * dot(p, v);
        // w = p - kfac v, stored in p
        for (pi, &vi) in p.iter_mut().zip(v) {
            *pi -= kfac * vi;
        }
        let w = &*p;
        for i in 0..m {
            let row = &mut trailing[i * n + k + 1 + i..(i + 1) * n];
            let (vi, wi) = (v[i], w[i]);
            for ((r, &vj), &wj) in row.iter_mut().zip(&v[i..]).zip(&w[i..]) {
                *r -= vi * wj + wi * vj;
            }
        }
    }
    if n > 0 {
        diag[n - 1] = a[n * n - 1];
    }
    (Tridiagonal { diag, off }, taus)
}

/// Forms `Qᵀ` (rows are columns of `Q`) from the stored reflectors.
fn accumulate_q_transpose(a: &[f64], taus: &[f64], n: usize) -> Vec<f64> {
    let mut x = vec![0.0; n * n];
    for i in 0..n {
        x[i * n + i] = 1.0;
    }
    for k in (0..n.saturating_sub(1)).rev() {
        let tau = taus[k];
        if tau == 0.0 {
            continue;
        }
        let v = &a[k * n + k + 1..(k + 1) * n];
        for i in k + 1..n {
            let seg = &mut x[i * n + k + 1..(i + 1) * n];
            let s = tau * dot(seg, v);
            if s != 0.0 {
                axpy(-s, v, seg);
            }
        }
    }
    x
}

/// Implicit-shift QL on a tridiagonal matrix. When `rows` is given, the same
/// rotations are applied to its rows (row `i` tracks eigenvector `i`).
fn tql(t: &mut Tridiagonal, mut rows: Option<&mut [f64]>, n: usize) -> Result<(), LinalgError> {
    let d = &mut t.diag;
    let e = &mut t.off;
    let eps = f64::EPSILON;
    let mut f = 0.0;
    let mut tst1: f64 = 0.0;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > MAX_QL_ITERATIONS {
                    return Err(LinalgError::NoConvergence { index: l });
                }
                let g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().take(n).skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    let g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    if let Some(z) = rows.as_deref_mut() {
                        let (lo, hi) = z.split_at_mut((i + 1) * n);
                        let zi = &mut lo[i * n..];
                        let zi1 = &mut hi[..n];
                        for (a, b) in zi.iter_mut().zip(zi1.iter_mut()) {
                            let hb = *b;
                            *b = s * *a + c * hb;
                            *a = c * *a - s * hb;
                        }
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    Ok(())
}

/// Stable ascending order of the eigenvalues.
fn ascending_order(values: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    idx
}

/// Flips the sign so the largest-magnitude component is positive.
fn canonical_sign(v: &mut [f64]) {
    let mut best = 0.0;
    let mut sign = 1.0;
    for &x in v.iter() {
        if x.abs() > best {
            best = x.abs();
            sign = x.signum();
        }
    }
    if sign < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

fn check_finite(m: &SymMatrix) -> Result<(), LinalgError> {
    let n = m.order();
    match m.as_slice().iter().position(|v| !v.is_finite()) {
        Some(pos) => Err(LinalgError::NonFinite {
            row: pos / n,
            col: pos % n,
        }),
        None => Ok(()),
    }
}

/// Index sets of the connected components of the nonzero pattern shared by
/// `mats`, each sorted; `None` when the pattern is irreducible.
fn decoupled_blocks(mats: &[&SymMatrix]) -> Option<Vec<Vec<usize>>> {
    let n = mats[0].order();
    let mut parent: Vec<usize> = (0..n).collect();
    fn root(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for m in mats {
        for i in 0..n {
            for (j, &v) in m.row(i)[..i].iter().enumerate() {
                if v != 0.0 {
                    let (a, b) = (root(&mut parent, i), root(&mut parent, j));
                    if a != b {
                        parent[a.max(b)] = a.min(b);
                    }
                }
            }
        }
    }
    let mut slot = vec![usize::MAX; n];
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    for i in 0..n {
        let r = root(&mut parent, i);
        if slot[r] == usize::MAX {
            slot[r] = blocks.len();
            blocks.push(Vec::new());
        }
        blocks[slot[r]].push(i);
    }
    (blocks.len() > 1).then_some(blocks)
}

/// Eigenvalues only, ascending. Decoupled blocks are solved separately.
pub fn sym_eigvals(m: &SymMatrix) -> Result<Vec<f64>, LinalgError> {
    check_finite(m)?;
    if m.order() > 1 {
        if let Some(blocks) = decoupled_blocks(&[m]) {
            let mut values = Vec::with_capacity(m.order());
            for idx in &blocks {
                values.extend(sym_eigvals_irreducible(&m.submatrix(idx))?);
            }
            values.sort_by(f64::total_cmp);
            return Ok(values);
        }
    }
    sym_eigvals_irreducible(m)
}

fn sym_eigvals_irreducible(m: &SymMatrix) -> Result<Vec<f64>, LinalgError> {
    let n = m.order();
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut a = m.as_slice().to_vec();
    let (mut t, _) = tridiagonalize(&mut a, n);
    drop(a);
    tql(&mut t, None, n)?;
    let mut values = t.diag;
    values.sort_by(f64::total_cmp);
    Ok(values)
}

/// Full eigendecomposition with orthonormal eigenvectors, returned as rows
/// (row `k` belongs to the `k`-th smallest eigenvalue).
fn sym_eig_rows(m: &SymMatrix) -> Result<(Vec<f64>, Vec<f64>), LinalgError> {
    check_finite(m)?;
    let n = m.order();
    if n == 0 {
        return Ok((Vec::new(), Vec::new()));
    }
    let mut a = m.as_slice().to_vec();
    let (mut t, taus) = tridiagonalize(&mut a, n);
    let mut rows = accumulate_q_transpose(&a, &taus, n);
    drop(a);
    tql(&mut t, Some(&mut rows), n)?;
    let order = ascending_order(&t.diag);
    let values = order.iter().map(|&i| t.diag[i]).collect();
    let mut sorted = vec![0.0; n * n];
    for (dst, &src) in order.iter().enumerate() {
        sorted[dst * n..(dst + 1) * n].copy_from_slice(&rows[src * n..(src + 1) * n]);
    }
    Ok((values, sorted))
}

fn rows_to_decomposition(
    values: Vec<f64>,
    mut rows: Vec<f64>,
    normalization: Normalization,
) -> EigDecomposition {
    let n = values.len();
    for k in 0..n {
        canonical_sign(&mut rows[k * n..(k + 1) * n]);
    }
    let mut cols = vec![0.0; n * n];
    transpose_into(&rows, &mut cols, n);
    EigDecomposition {
        values,
        vectors: DenseMatrix::from_row_major(n, n, cols),
        normalization,
    }
}

/// Symmetric eigendecomposition with orthonormal eigenvectors.
pub fn sym_eig(m: &SymMatrix) -> Result<EigDecomposition, LinalgError> {
    let (values, rows) = sym_eig_rows(m)?;
    Ok(rows_to_decomposition(values, rows, Normalization::UnitNorm))
}

/// Standard-form matrix `L⁻¹ A L⁻ᵀ` of a pair, together with the factor used.
pub fn reduce_to_standard(p: &MatrixPair) -> Result<(SymMatrix, PermutedCholesky), LinalgError> {
    check_finite(p.a())?;
    let chol = PermutedCholesky::new(p.b())?;
    let c = match chol.permutation() {
        None => chol.factor().congruence_inverse(p.a()),
        Some(perm) => chol.factor().congruence_inverse(&p.a().permuted(perm)),
    };
    Ok((c, chol))
}

/// Generalized eigenvalues of `(A, B)`, ascending. Blocks decoupled in both
/// matrices are solved separately.
pub fn generalized_eigvals(p: &MatrixPair) -> Result<Vec<f64>, LinalgError> {
    if p.order() > 1 {
        check_finite(p.a())?;
        check_finite(p.b())?;
        if let Some(blocks) = decoupled_blocks(&[p.a(), p.b()]) {
            let mut values = Vec::with_capacity(p.order());
            for idx in &blocks {
                let sub = MatrixPair::new(p.a().submatrix(idx), p.b().submatrix(idx))?;
                let (c, _) = reduce_to_standard(&sub).map_err(|e| match e {
                    LinalgError::NotPositiveDefinite { pivot } => {
                        LinalgError::NotPositiveDefinite { pivot: idx[pivot] }
                    }
                    other => other,
                })?;
                values.extend(sym_eigvals_irreducible(&c)?);
            }
            values.sort_by(f64::total_cmp);
            return Ok(values);
        }
    }
    let (c, _) = reduce_to_standard(p)?;
    sym_eigvals(&c)
}

/// Solves `A u = λ B u` with `B`-orthonormal eigenvectors.
pub fn generalized_eig(p: &MatrixPair) -> Result<EigDecomposition, LinalgError> {
    let (c, chol) = reduce_to_standard(p)?;
    let n = c.order();
    let (values, mut rows) = sym_eig_rows(&c)?;
    drop(c);
    to_pair_basis(&chol, &mut rows, n);
    Ok(rows_to_decomposition(
        values,
        rows,
        Normalization::BOrthonormal,
    ))
}

/// Maps rows `y` of the standard problem to `u = Pᵀ L⁻ᵀ y`.
fn to_pair_basis(chol: &PermutedCholesky, rows: &mut [f64], count: usize) {
    let n = chol.factor().order();
    chol.factor().backward_rows(rows, count);
    if let Some(perm) = chol.permutation() {
        let mut tmp = vec![0.0; n];
        for k in 0..count {
            let row = &mut rows[k * n..(k + 1) * n];
            for (i, &pi) in perm.iter().enumerate() {
                tmp[pi] = row[i];
            }
            row.copy_from_slice(&tmp);
        }
    }
}

fn tridiagonal_norm(t: &Tridiagonal) -> f64 {
    let n = t.diag.len();
    (0..n)
        .map(|i| t.diag[i].abs() + t.off[i].abs() + if i > 0 { t.off[i - 1].abs() } else { 0.0 })
        .fold(0.0, f64::max)
}

/// LU factors of `T − σI` with partial pivoting, in the layout of LAPACK `dgttrf`.
struct ShiftedLu {
    dl: Vec<f64>,
    d: Vec<f64>,
    du: Vec<f64>,
    du2: Vec<f64>,
    swapped: Vec<bool>,
}

impl ShiftedLu {
    fn new(t: &Tridiagonal, sigma: f64, tiny: f64) -> Self {
        let n = t.diag.len();
        let mut d: Vec<f64> = t.diag.iter().map(|v| v - sigma).collect();
        let mut dl = t.off[..n.saturating_sub(1)].to_vec();
        let mut du = dl.clone();
        let mut du2 = vec![0.0; n.saturating_sub(2)];
        let mut swapped = vec![false; n.saturating_sub(1)];
        for i in 0..n.saturating_sub(1) {
            if d[i].abs() >= dl[i].abs() {
                if d[i] != 0.0 {
                    let fact = dl[i] / d[i];
                    dl[i] = fact;
                    d[i + 1] -= fact * du[i];
                }
            } else {
                let fact = d[i] / dl[i];
                d[i] = dl[i];
                dl[i] = fact;
                let temp = du[i];
                du[i] = d[i + 1];
                d[i + 1] = temp - fact * d[i + 1];
                if i + 2 < n {
                    du2[i] = du[i + 1];
                    du[i + 1] = -fact * du[i + 1];
                }
                swapped[i] = true;
            }
        }
        for v in &mut d {
            if v.abs() < tiny {
                *v = if *v < 0.0 { -tiny } else { tiny };
            }
        }
        Self {
            dl,
            d,
            du,
            du2,
            swapped,
        }
    }

    fn solve(&self, b: &mut [f64]) {
        let n = b.len();
        for i in 0..n.saturating_sub(1) {
            if self.swapped[i] {
                let temp = b[i];
                b[i] = b[i + 1];
                b[i + 1] = temp - self.dl[i] * b[i];
            } else {
                b[i + 1] -= self.dl[i] * b[i];
            }
        }
        for i in (0..n).rev() {
            let mut v = b[i];
            if i + 1 < n {
                v -= self.du[i] * b[i + 1];
            }
            if i + 2 < n {
                v -= self.du2[i] * b[i + 2];
            }
            b[i] = v / self.d[i];
        }
    }
}

/// Inverse iteration for the eigenvectors of `t` belonging to the ascending
/// `shifts`. Vectors whose shifts lie within `1e-3 ‖T‖` of each other are kept
/// mutually orthogonal. Returns unit rows.
fn tridiagonal_vectors(t: &Tridiagonal, shifts: &[f64]) -> Vec<f64> {
    let n = t.diag.len();
    let tnorm = tridiagonal_norm(t).max(f64::MIN_POSITIVE);
    let eps = f64::EPSILON;
    let tiny = eps * tnorm;
    let mut rows = vec![0.0; shifts.len() * n];
    let mut group_start = 0;
    let mut prev = f64::NEG_INFINITY;
    let mut state: u64 = 0x9e37_79b9_7f4a_7c15;
    for (k, &lambda) in shifts.iter().enumerate() {
        let mut sigma = lambda;
        if k > 0 {
            if sigma - shifts[k - 1] > 1e-3 * tnorm {
                group_start = k;
            }
            if sigma - prev < 10.0 * tiny {
                sigma = prev + 10.0 * tiny;
            }
        }
        prev = sigma;
        let lu = ShiftedLu::new(t, sigma, tiny);
        let (done, rest) = rows.split_at_mut(k * n);
        let x = &mut rest[..n];
        for v in x.iter_mut() {
            state = state
                .wrapping_mul(6_364_136_223_846_793_005)
                .wrapping_add(1_442_695_040_888_963_407);
            *v = (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5;
        }
        for _ in 0..3 {
            lu.solve(x);
            for _ in 0..2 {
                for j in group_start..k {
                    let q = &done[j * n..(j + 1) * n];
                    let s = dot(x, q);
                    axpy(-s, q, x);
                }
            }
            let norm = norm2(x);
            x.iter_mut().for_each(|v| *v /= norm);
        }
    }
    rows
}

/// Applies `Q` to each row, where `A = Q T Qᵀ` from [`tridiagonalize`].
fn apply_q(a: &[f64], taus: &[f64], n: usize, rows: &mut [f64]) {
    for x in rows.chunks_mut(n) {
        for k in (0..n.saturating_sub(1)).rev() {
            let tau = taus[k];
            if tau == 0.0 {
                continue;
            }
            let v = &a[k * n + k + 1..(k + 1) * n];
            let seg = &mut x[k + 1..];
            let s = tau * dot(seg, v);
            axpy(-s, v, seg);
        }
    }
}

/// Rayleigh quotient `uᵀAu / uᵀBu` with compensated products.
fn rayleigh_compensated(a: &CsrMatrix, b: &CsrMatrix, u: &[f64]) -> f64 {
    let au = a.mul_vec_compensated(u);
    let bu = b.mul_vec_compensated(u);
    compensated_dot(u.iter().copied().zip(au)) / compensated_dot(u.iter().copied().zip(bu))
}

fn low_count(values: &[f64], rel: f64) -> usize {
    let top = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    values.iter().take_while(|&&v| v < rel * top).count()
}

/// Generalized eigenvalues, ascending, where those below `rel · max|λ|` are
/// recomputed as Rayleigh quotients of inverse-iteration vectors.
///
/// The QL values carry an absolute error near `ε · max|λ|`; the quotients are
/// accurate relative to each eigenvalue instead.
pub fn generalized_eigvals_refined(p: &MatrixPair, rel: f64) -> Result<Vec<f64>, LinalgError> {
    let (mut values, low) = refined_low(p, rel)?;
    for (k, (v, _)) in low.iter().enumerate() {
        values[k] = *v;
    }
    values.sort_by(f64::total_cmp);
    Ok(values)
}

/// All QL values, ascending, plus `(quotient, B-normalized vector)` for those
/// below `rel · max|λ|`, sorted by quotient.
fn refined_low(p: &MatrixPair, rel: f64) -> Result<(Vec<f64>, Vec<(f64, Vec<f64>)>), LinalgError> {
    let (c, chol) = reduce_to_standard(p)?;
    let n = c.order();
    if n == 0 {
        return Ok((Vec::new(), Vec::new()));
    }
    let mut a = c.as_slice().to_vec();
    drop(c);
    let (t, taus) = tridiagonalize(&mut a, n);
    let mut work = t.clone();
    tql(&mut work, None, n)?;
    let mut values = work.diag;
    values.sort_by(f64::total_cmp);
    let count = low_count(&values, rel);
    if count == 0 {
        return Ok((values, Vec::new()));
    }
    let mut rows = tridiagonal_vectors(&t, &values[..count]);
    apply_q(&a, &taus, n, &mut rows);
    drop(a);
    to_pair_basis(&chol, &mut rows, count);
    let (ka, kb) = (CsrMatrix::from_sym(p.a()), CsrMatrix::from_sym(p.b()));
    let top = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let gap = f64::EPSILON.sqrt() * top;
    let mut low = Vec::with_capacity(count);
    let mut start = 0;
    while start < count {
        let mut end = start + 1;
        while end < count && values[end] - values[end - 1] <= gap {
            end += 1;
        }
        let group: Vec<&[f64]> = rows[start * n..end * n].chunks(n).collect();
        if group.len() == 1 {
            low.push((rayleigh_compensated(&ka, &kb, group[0]), group[0].to_vec()));
        } else {
            low.extend(ritz_compensated(&ka, &kb, &group)?);
        }
        start = end;
    }
    low.sort_by(|x, y| x.0.total_cmp(&y.0));
    Ok((values, low))
}

/// Rayleigh-Ritz on the span of `group`. Vectors closer than `√ε · max|λ|`
/// mix at order one, yet their span is accurate.
fn ritz_compensated(
    a: &CsrMatrix,
    b: &CsrMatrix,
    group: &[&[f64]],
) -> Result<Vec<(f64, Vec<f64>)>, LinalgError> {
    let g = group.len();
    let au: Vec<Vec<f64>> = group.iter().map(|u| a.mul_vec_compensated(u)).collect();
    let bu: Vec<Vec<f64>> = group.iter().map(|u| b.mul_vec_compensated(u)).collect();
    let project = |prod: &[Vec<f64>]| {
        SymMatrix::from_lower_fn(g, |i, j| {
            let x = compensated_dot(group[i].iter().copied().zip(prod[j].iter().copied()));
            let y = compensated_dot(group[j].iter().copied().zip(prod[i].iter().copied()));
            0.5 * (x + y)
        })
    };
    let small = generalized_eig(&MatrixPair::new(project(&au), project(&bu))?)?;
    let n = group[0].len();
    Ok((0..g)
        .map(|k| {
            let y = small.vector(k);
            let mut u = vec![0.0; n];
            for (c, v) in y.iter().zip(group) {
                axpy(*c, v, &mut u);
            }
            (rayleigh_compensated(a, b, &u), u)
        })
        .collect())
}

/// Replaces the pairs with eigenvalues below `rel · max|λ|` in a
/// decomposition of `p` by inverse-iteration vectors and their compensated
/// Rayleigh quotients, keeping the ascending order.
pub fn refine_low_eigenvalues(
    p: &MatrixPair,
    eig: &mut EigDecomposition,
    rel: f64,
) -> Result<(), LinalgError> {
    let (_, low) = refined_low(p, rel)?;
    for (k, (v, u)) in low.iter().enumerate() {
        eig.values[k] = *v;
        let norm = match eig.normalization {
            Normalization::BOrthonormal => 1.0,
            Normalization::UnitNorm => norm2(u),
        };
        for (i, x) in u.iter().enumerate() {
            eig.vectors[(i, k)] = x / norm;
        }
    }
    Ok(())
}

/// Largest residual `‖A u_k − λ_k B u_k‖₂ / ‖u_k‖₂` over all computed pairs.
pub fn max_residual(p: &MatrixPair, eig: &EigDecomposition) -> f64 {
    (0..eig.len())
        .map(|k| {
            let u = eig.vector(k);
            let au = p.a().mul_vec(&u);
            let bu = p.b().mul_vec(&u);
            let r: Vec<f64> = au
                .iter()
                .zip(&bu)
                .map(|(x, y)| x - eig.values[k] * y)
                .collect();
            norm2(&r) / norm2(&u)
        })
        .fold(0.0, f64::max)
}
