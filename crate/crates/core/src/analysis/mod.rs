//! Spectra, frequency ratios, critical steps and the eigenvalue / condition
//! bounds of the scaled systems.

mod bounds;
mod element;

use serde::Serialize;
use thiserror::Error;

use crate::fem::{FeModel, FemError};
use crate::linalg::{generalized_eigvals, LinalgError, MatrixPair};
use crate::scaling::{ScaledSystem, ScalingError, ScalingSpec};

pub use bounds::{
    condition_report, corollary_bound, element_chain, element_mass_ratio_range, fried,
    gershgorin_scaled, irons_wathen, method_condition_ratio_bound, sandwich_bounds,
    sandwich_from_spectra, BoundRecord, BoundSet, ConditionReport,
};
pub use element::{
    element_rayleigh_report, ElementRayleighReport, RayleighRow, ELEMENT_RIGID_MODES,
};

/// Eigenvalues below this fraction of `λₙ` are rigid-body modes.
pub const RIGID_RTOL: f64 = 1e-8;

/// Number of largest-β samples used by [`fit_slope`].
pub const SLOPE_SAMPLES: usize = 5;

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("largest eigenvalue {0} is not positive")]
    NonPositiveEigenvalue(f64),
    #[error("no corollary bound for scaling kind {0}")]
    NoBoundForKind(String),
    #[error("mesh is not uniform: element masses range over [{min}, {max}]")]
    NonUniformMesh { min: f64, max: f64 },
    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Scaling(#[from] ScalingError),
    #[error(transparent)]
    Fem(#[from] FemError),
}

/// Central-difference critical step `2/√λ_max`.
pub fn critical_dt(lambda_max: f64) -> Result<f64, AnalysisError> {
    if lambda_max > 0.0 && lambda_max.is_finite() {
        Ok(2.0 / lambda_max.sqrt())
    } else {
        Err(AnalysisError::NonPositiveEigenvalue(lambda_max))
    }
}

/// Count of leading eigenvalues below `RIGID_RTOL · λₙ`.
pub fn rigid_count(ascending: &[f64]) -> usize {
    let top = ascending.last().copied().unwrap_or(0.0);
    ascending
        .iter()
        .take_while(|&&v| v < RIGID_RTOL * top)
        .count()
}

pub(crate) fn flexible_start(ascending: &[f64]) -> usize {
    rigid_count(ascending)
}

/// `ω = √max(λ, 0)`.
pub fn frequencies(values: &[f64]) -> Vec<f64> {
    values.iter().map(|v| v.max(0.0).sqrt()).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RatioPoint {
    /// 1-based mode index.
    pub mode: usize,
    pub omega: f64,
    pub omega_bar: f64,
    pub ratio: f64,
}

/// `ωᵢ/ω̄ᵢ` over the flexible modes of the original spectrum; the same rigid
/// count is dropped from the scaled one.
pub fn frequency_ratio_curve(orig: &[f64], scaled: &[f64]) -> Vec<RatioPoint> {
    let start = rigid_count(orig);
    (start..orig.len().min(scaled.len()))
        .map(|k| {
            let (w, wb) = (orig[k].max(0.0).sqrt(), scaled[k].max(0.0).sqrt());
            RatioPoint {
                mode: k + 1,
                omega: w,
                omega_bar: wb,
                ratio: w / wb,
            }
        })
        .collect()
}

pub fn ratio_curve_csv(curve: &[RatioPoint]) -> String {
    let mut s = String::from("mode,omega,omega_bar,ratio\n");
    for p in curve {
        s.push_str(&format!(
            "{},{:.16e},{:.16e},{:.16e}\n",
            p.mode, p.omega, p.omega_bar, p.ratio
        ));
    }
    s
}

/// `8n / (7 m N)` for a mesh of hex8 elements with equal masses.
pub fn asymptotic_cond_rate(model: &FeModel) -> Result<f64, AnalysisError> {
    let (min, max) = model
        .blocks
        .iter()
        .map(|b| b.element_mass)
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
            (lo.min(v), hi.max(v))
        });
    if model.blocks.is_empty() || max - min > 1e-12 * max {
        return Err(AnalysisError::NonUniformMesh { min, max });
    }
    let n = model.dof_count() as f64;
    let m = crate::fem::ELEMENT_DOFS as f64;
    Ok(8.0 * n / (7.0 * m * model.blocks.len() as f64))
}

/// Least-squares slope through the `SLOPE_SAMPLES` points with largest `x`.
pub fn fit_slope(x: &[f64], y: &[f64]) -> Result<f64, AnalysisError> {
    let mut pts: Vec<(f64, f64)> = x.iter().copied().zip(y.iter().copied()).collect();
    if pts.len() < 2 {
        return Err(AnalysisError::TooFewSamples {
            needed: 2,
            got: pts.len(),
        });
    }
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let tail = &pts[pts.len().saturating_sub(SLOPE_SAMPLES)..];
    let k = tail.len() as f64;
    let mx = tail.iter().map(|p| p.0).sum::<f64>() / k;
    let my = tail.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = tail.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = tail.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Ok(sxy / sxx)
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectralReport {
    pub label: String,
    pub spec: ScalingSpec,
    pub dof_count: usize,
    pub rigid_modes: usize,
    pub eigenvalues: Vec<f64>,
    pub scaled_eigenvalues: Vec<f64>,
    pub ratio_curve: Vec<RatioPoint>,
    pub critical_dt: f64,
    pub scaled_critical_dt: f64,
    /// `Δt̄_c / Δt_c`.
    pub dt_ratio: f64,
    pub max_ratio: f64,
    pub min_ratio: f64,
    pub corollary_bound: Option<f64>,
    /// Gershgorin bound on `M^(-1/2)K̄M^(-1/2)`.
    pub gershgorin: f64,
    pub bounds: BoundSet,
    pub condition: Option<ConditionReport>,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct ReportOptions {
    /// Adds the sandwich chain (one extra eigensolve of `(M̄, M)`).
    pub sandwich: bool,
    /// Adds condition numbers (two extra eigensolves).
    pub condition: bool,
}

/// Spectral report of `system` against the original eigenvalues `orig`.
pub fn spectral_report(
    model: &FeModel,
    system: &ScaledSystem,
    orig: &[f64],
    options: ReportOptions,
) -> Result<SpectralReport, AnalysisError> {
    let scaled = system.eigenvalues()?;
    report_from_spectra(model, system, orig, scaled, options)
}

/// [`spectral_report`] with the scaled eigenvalues already known.
pub fn report_from_spectra(
    model: &FeModel,
    system: &ScaledSystem,
    orig: &[f64],
    scaled: Vec<f64>,
    options: ReportOptions,
) -> Result<SpectralReport, AnalysisError> {
    let top = *orig
        .last()
        .ok_or(AnalysisError::NonPositiveEigenvalue(0.0))?;
    let top_bar = *scaled
        .last()
        .ok_or(AnalysisError::NonPositiveEigenvalue(0.0))?;
    let dt = critical_dt(top)?;
    let dt_bar = critical_dt(top_bar)?;
    let curve = frequency_ratio_curve(orig, &scaled);
    let (min_ratio, max_ratio) = curve
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
            (lo.min(p.ratio), hi.max(p.ratio))
        });
    let corollary = corollary_bound(&system.spec, &model.blocks).ok();
    let mut bounds = BoundSet::default();
    if let Some(b) = corollary {
        bounds.push(BoundRecord::new("corollary", 1.0, min_ratio, max_ratio, b));
    }
    // only a bound on λ̄ₙ when K̄ = K and M̄ ⪰ M
    let lft = matches!(
        system.spec,
        ScalingSpec::UniformLft { .. }
            | ScalingSpec::StiffnessProportionalLft { .. }
            | ScalingSpec::Lft { .. }
    );
    let gershgorin = gershgorin_scaled(&system.kbar, &model.lumped_mass);
    if !lft {
        bounds.push(BoundRecord::new(
            "gershgorin",
            f64::NEG_INFINITY,
            top_bar,
            top_bar,
            gershgorin,
        ));
    }
    let mut pair_values = None;
    if options.sandwich {
        let m = model.mass_matrix();
        let mbar_m = generalized_eigvals(&MatrixPair::new(system.mbar.to_dense(), m)?)?;
        bounds.extend(sandwich_from_spectra(orig, &scaled, &mbar_m));
        if let Some(el) = &system.elements {
            bounds.push(element_chain(&model.blocks, el, &mbar_m)?);
        }
        pair_values = Some(mbar_m);
    }
    let condition = if options.condition {
        Some(condition_report(model, system, pair_values.as_deref())?)
    } else {
        None
    };
    Ok(SpectralReport {
        label: system.spec.label(),
        spec: system.spec.clone(),
        dof_count: model.dof_count(),
        rigid_modes: rigid_count(orig),
        eigenvalues: orig.to_vec(),
        scaled_eigenvalues: scaled,
        ratio_curve: curve,
        critical_dt: dt,
        scaled_critical_dt: dt_bar,
        dt_ratio: dt_bar / dt,
        max_ratio,
        min_ratio,
        corollary_bound: corollary,
        gershgorin,
        bounds,
        condition,
    })
}
