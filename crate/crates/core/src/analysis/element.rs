//! Per-element Rayleigh quotients `Qₑ(uₖ)` and the scaled element spectrum.

use serde::Serialize;

use super::AnalysisError;
use crate::fem::{rigid_body_modes, ElementBlock};
use crate::linalg::{
    generalized_eig, generalized_eigvals_refined, refine_low_eigenvalues, sym_eig, MatrixPair,
    SymMatrix,
};
use crate::scaling::REFINE_BELOW;

/// Rigid-body modes of a free hex8 element.
pub const ELEMENT_RIGID_MODES: usize = 6;

/// Neighbouring element eigenvalues closer than this (relative) share an
/// eigenspace.
const REPEAT_RTOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RayleighRow {
    /// 1-based mode index of `λₖ(Kₑ, Mₑ)`.
    pub mode: usize,
    pub lambda: f64,
    /// `uₖᵀM̄ₑuₖ / uₖᵀMₑuₖ`.
    pub q: f64,
    /// `λₖ / Qₖ`.
    pub predicted: f64,
    /// 1-based position of `predicted` in the ascending scaled spectrum.
    pub position: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ElementRayleighReport {
    pub rows: Vec<RayleighRow>,
    /// `λ(Kₑ, M̄ₑ)` from the solver.
    pub scaled: Vec<f64>,
    /// Largest relative gap between sorted predictions and solver values over
    /// flexible modes; zero when every `uₖ` is also an eigenvector of `M̄ₑ`.
    pub consistency: f64,
    /// Flexible modes that change place, `position ≠ mode`.
    pub inversions: Vec<usize>,
}

impl ElementRayleighReport {
    pub fn ordering_preserved(&self) -> bool {
        self.inversions.is_empty()
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("mode,lambda,q,predicted,position\n");
        for r in &self.rows {
            s.push_str(&format!(
                "{},{:.16e},{:.16e},{:.16e},{}\n",
                r.mode, r.lambda, r.q, r.predicted, r.position
            ));
        }
        s
    }
}

/// Rayleigh table of `M̄ₑ` against the lumped pair `(Kₑ, Mₑ)`. Inside each
/// repeated eigenvalue of `(Kₑ, Mₑ)` the basis is rotated to diagonalize
/// `M̄ₑ`, so shared eigenvectors are found whenever they exist.
pub fn element_rayleigh_report(
    block: &ElementBlock,
    mbar: &SymMatrix,
) -> Result<ElementRayleighReport, AnalysisError> {
    let pair = block.lumped_pair();
    let mut eig = generalized_eig(&pair)?;
    refine_low_eigenvalues(&pair, &mut eig, REFINE_BELOW)?;
    let m = eig.len();
    let lam = eig.values.clone();
    let ml = block.lumped_matrix();
    // the solver's flexible vectors carry rigid components of order
    // ε·λₘ/λ₇, which a thin element makes visible in Q
    let rigid_basis = m_orthonormal(&ml, rigid_body_modes(&block.geometry));
    let mut q = vec![0.0; m];
    let mut start = 0;
    while start < m {
        let cols = if start == 0 {
            rigid_basis.clone()
        } else {
            let mut end = start + 1;
            while end < m && lam[end] - lam[end - 1] <= REPEAT_RTOL * lam[end].abs() {
                end += 1;
            }
            let cols: Vec<Vec<f64>> = (start..end)
                .map(|k| {
                    let mut u = eig.vector(k);
                    for r in &rigid_basis {
                        let c = m_dot(&ml, r, &u);
                        u.iter_mut().zip(r).for_each(|(x, y)| *x -= c * y);
                    }
                    u
                })
                .collect();
            m_orthonormal(&ml, cols)
        };
        let width = cols.len();
        let s = SymMatrix::from_lower_fn(width, |i, j| m_dot(mbar, &cols[i], &cols[j]));
        // the columns are Mₑ-orthonormal, so the restricted problem is standard
        let local = sym_eig(&s)?;
        q[start..start + width].copy_from_slice(&local.values);
        start += width;
    }
    let scaled = generalized_eigvals_refined(
        &MatrixPair::new(block.stiffness.clone(), mbar.clone())?,
        REFINE_BELOW,
    )?;
    let predicted: Vec<f64> = lam.iter().zip(&q).map(|(l, q)| l / q).collect();
    let rigid = ELEMENT_RIGID_MODES.min(m);
    let mut order: Vec<usize> = (rigid..m).collect();
    order.sort_by(|&a, &b| predicted[a].total_cmp(&predicted[b]));
    let mut position = vec![0; m];
    for (k, p) in position.iter_mut().enumerate().take(rigid) {
        *p = k + 1;
    }
    for (rank, &k) in order.iter().enumerate() {
        position[k] = rigid + rank + 1;
    }
    let mut sorted_pred: Vec<f64> = predicted[rigid..].to_vec();
    sorted_pred.sort_by(f64::total_cmp);
    let consistency = sorted_pred
        .iter()
        .zip(&scaled[rigid..])
        .map(|(p, s)| ((p - s) / s).abs())
        .fold(0.0, f64::max);
    let rows: Vec<RayleighRow> = (0..m)
        .map(|k| RayleighRow {
            mode: k + 1,
            lambda: lam[k],
            q: q[k],
            predicted: predicted[k],
            position: position[k],
        })
        .collect();
    // modes sharing a value cannot be out of order among themselves
    let inversions = (rigid..m)
        .filter(|&k| {
            let target = position[k] - 1;
            target != k
                && (predicted[target] - predicted[k]).abs() > REPEAT_RTOL * predicted[k].abs()
        })
        .map(|k| k + 1)
        .collect();
    Ok(ElementRayleighReport {
        rows,
        scaled,
        consistency,
        inversions,
    })
}

fn m_dot(m: &SymMatrix, x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(m.mul_vec(y)).map(|(a, b)| a * b).sum()
}

/// Modified Gram-Schmidt in the `M` inner product, twice.
fn m_orthonormal(m: &SymMatrix, mut cols: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    for k in 0..cols.len() {
        for _ in 0..2 {
            for j in 0..k {
                let c = m_dot(m, &cols[j], &cols[k]);
                let (done, rest) = cols.split_at_mut(k);
                rest[0]
                    .iter_mut()
                    .zip(&done[j])
                    .for_each(|(x, y)| *x -= c * y);
            }
        }
        let norm = m_dot(m, &cols[k], &cols[k]).sqrt();
        cols[k].iter_mut().for_each(|x| *x /= norm);
    }
    cols
}
