//! Bound records and the eigenvalue / condition-number chains.

use serde::Serialize;

use super::{flexible_start, AnalysisError};
use crate::fem::{ElementBlock, FeModel};
use crate::linalg::{
    extreme_ratio, generalized_eigvals, generalized_eigvals_refined, gershgorin_max, sym_eigvals,
    MatrixPair, SymMatrix,
};
use crate::scaling::{ElementScaling, OlovssonVariant, ScaledSystem, ScalingSpec, REFINE_BELOW};

/// One inequality `lower ≤ observed ≤ upper`, with the observed range kept so
/// a violation shows up as a negative slack.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundRecord {
    pub source: String,
    pub lower: f64,
    pub observed_min: f64,
    pub observed_max: f64,
    pub upper: f64,
}

impl BoundRecord {
    pub fn new(
        source: impl Into<String>,
        lower: f64,
        observed_min: f64,
        observed_max: f64,
        upper: f64,
    ) -> Self {
        Self {
            source: source.into(),
            lower,
            observed_min,
            observed_max,
            upper,
        }
    }

    pub fn lower_slack(&self) -> f64 {
        self.observed_min - self.lower
    }

    pub fn upper_slack(&self) -> f64 {
        self.upper - self.observed_max
    }

    /// Both sides hold up to `rtol` relative to the bound values.
    pub fn holds(&self, rtol: f64) -> bool {
        let lo =
            !self.lower.is_finite() || self.observed_min >= self.lower - rtol * self.lower.abs();
        let hi =
            !self.upper.is_finite() || self.observed_max <= self.upper + rtol * self.upper.abs();
        lo && hi && !self.observed_min.is_nan() && !self.observed_max.is_nan()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct BoundSet {
    pub records: Vec<BoundRecord>,
}

impl BoundSet {
    pub fn push(&mut self, r: BoundRecord) {
        self.records.push(r);
    }

    pub fn extend(&mut self, other: BoundSet) {
        self.records.extend(other.records);
    }

    pub fn get(&self, source: &str) -> Option<&BoundRecord> {
        self.records.iter().find(|r| r.source == source)
    }

    pub fn all_hold(&self, rtol: f64) -> bool {
        self.records.iter().all(|r| r.holds(rtol))
    }

    /// Records that fail at `rtol`.
    pub fn violations(&self, rtol: f64) -> Vec<&BoundRecord> {
        self.records.iter().filter(|r| !r.holds(rtol)).collect()
    }
}

fn min_max(it: impl IntoIterator<Item = f64>) -> (f64, f64) {
    it.into_iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
            (lo.min(v), hi.max(v))
        })
}

/// `λ₁(M̄,M) ≤ λₖ(K,M)/λₖ(K,M̄) ≤ λₙ(M̄,M)` over flexible modes, and the
/// monotonicity `λₖ(K,M̄) ≤ λₖ(K,M)`.
pub fn sandwich_from_spectra(orig: &[f64], scaled: &[f64], mbar_m: &[f64]) -> BoundSet {
    let start = flexible_start(orig);
    let ratios = || {
        orig[start..]
            .iter()
            .zip(&scaled[start..])
            .map(|(l, s)| l / s)
    };
    let (lo, hi) = min_max(ratios());
    let mut set = BoundSet::default();
    set.push(BoundRecord::new(
        "eig_bounds_ratio",
        mbar_m[0],
        lo,
        hi,
        *mbar_m.last().unwrap(),
    ));
    set.push(BoundRecord::new(
        "spsd_monotonicity",
        1.0,
        lo,
        hi,
        f64::INFINITY,
    ));
    set
}

/// [`sandwich_from_spectra`] with all three spectra computed here.
pub fn sandwich_bounds(
    k: &SymMatrix,
    m: &SymMatrix,
    mbar: &SymMatrix,
) -> Result<BoundSet, AnalysisError> {
    let orig = generalized_eigvals_refined(&MatrixPair::new(k.clone(), m.clone())?, REFINE_BELOW)?;
    let scaled =
        generalized_eigvals_refined(&MatrixPair::new(k.clone(), mbar.clone())?, REFINE_BELOW)?;
    let mbar_m = generalized_eigvals(&MatrixPair::new(mbar.clone(), m.clone())?)?;
    Ok(sandwich_from_spectra(&orig, &scaled, &mbar_m))
}

/// Extreme values of `λ(M̄ₑ, Mₑ)` over the elements.
pub fn element_mass_ratio_range(
    blocks: &[ElementBlock],
    scaling: &ElementScaling,
) -> Result<(f64, f64), AnalysisError> {
    let mut out = (f64::INFINITY, f64::NEG_INFINITY);
    for (b, mbar) in blocks.iter().zip(&scaling.masses) {
        let ev = generalized_eigvals(&MatrixPair::new(mbar.clone(), b.lumped_matrix())?)?;
        out = (out.0.min(ev[0]), out.1.max(*ev.last().unwrap()));
    }
    Ok(out)
}

/// `minₑ λ₁(M̄ₑ,Mₑ) ≤ λ₁(M̄,M)` and `λₙ(M̄,M) ≤ maxₑ λ_m(M̄ₑ,Mₑ)`.
pub fn element_chain(
    blocks: &[ElementBlock],
    scaling: &ElementScaling,
    mbar_m: &[f64],
) -> Result<BoundRecord, AnalysisError> {
    let (lo, hi) = element_mass_ratio_range(blocks, scaling)?;
    Ok(BoundRecord::new(
        "element_chain",
        lo,
        mbar_m[0],
        *mbar_m.last().unwrap(),
        hi,
    ))
}

/// Irons–Wathen: `minₑ λ₁(Kₑ,Mₑ) ≤ λ₁(K,M)` and `λₙ(K,M) ≤ maxₑ λ_m(Kₑ,Mₑ)`,
/// for any element masses (lumped when `masses` is `None`).
pub fn irons_wathen(
    blocks: &[ElementBlock],
    masses: Option<&[SymMatrix]>,
    global: &[f64],
) -> Result<BoundRecord, AnalysisError> {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for (e, b) in blocks.iter().enumerate() {
        let m = masses.map_or_else(|| b.lumped_matrix(), |ms| ms[e].clone());
        let ev = generalized_eigvals(&MatrixPair::new(b.stiffness.clone(), m)?)?;
        lo = lo.min(ev[0]);
        hi = hi.max(*ev.last().unwrap());
    }
    Ok(BoundRecord::new(
        "irons_wathen",
        lo,
        global[0],
        *global.last().unwrap(),
        hi,
    ))
}

/// Fried: `maxₑ λ_m(Aₑ) ≤ λₙ(A) ≤ p_max maxₑ λ_m(Aₑ)` and `minₑ λ₁(Aₑ) ≤ λ₁(A)`.
pub fn fried(
    element_matrices: &[SymMatrix],
    global: &[f64],
    p_max: usize,
) -> Result<BoundSet, AnalysisError> {
    // zero eigenvalues of singular matrices come out as signed roundoff
    let snap = |v: f64, top: f64| {
        if v.abs() <= super::RIGID_RTOL * top.abs() {
            0.0
        } else {
            v
        }
    };
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for a in element_matrices {
        let ev = sym_eigvals(a)?;
        let last = *ev.last().unwrap();
        lo = lo.min(snap(ev[0], last));
        hi = hi.max(last);
    }
    let top = *global.last().unwrap();
    let bottom = snap(global[0], top);
    let mut set = BoundSet::default();
    set.push(BoundRecord::new(
        "fried_max",
        hi,
        top,
        top,
        p_max as f64 * hi,
    ));
    set.push(BoundRecord::new(
        "fried_min",
        lo,
        bottom,
        bottom,
        f64::INFINITY,
    ));
    Ok(set)
}

/// Upper bound on `ωᵢ/ω̄ᵢ` for kinds that have one. Local deflation S2 needs
/// the element blocks.
pub fn corollary_bound(spec: &ScalingSpec, blocks: &[ElementBlock]) -> Result<f64, AnalysisError> {
    match spec {
        ScalingSpec::None => Ok(1.0),
        ScalingSpec::Cms { alpha, .. } => Ok(alpha.sqrt()),
        ScalingSpec::LocalDeflationS1 { alpha, .. } => Ok((1.0 + alpha).sqrt()),
        ScalingSpec::LocalDeflationS2 { rank } => {
            let mut worst: f64 = 1.0;
            for b in blocks {
                let ev = generalized_eigvals_refined(&b.lumped_pair(), REFINE_BELOW)?;
                let m = ev.len();
                if *rank > 0 && *rank < m {
                    worst = worst.max((ev[m - 1] / ev[m - rank - 1]).sqrt());
                }
            }
            Ok(worst)
        }
        ScalingSpec::Olovsson {
            beta,
            variant: OlovssonVariant::Original,
        } => Ok((1.0 + 8.0 * beta / 7.0).sqrt()),
        ScalingSpec::Olovsson {
            beta,
            variant: OlovssonVariant::Projector,
        } => Ok((1.0 + beta).sqrt()),
        ScalingSpec::Hoffmann { beta } => Ok((1.0 + 4.5 * beta).sqrt()),
        other => Err(AnalysisError::NoBoundForKind(other.label())),
    }
}

/// Bound on `κ(M̄)/κ(M)` implied by the element spectra of `(M̄ₑ, Mₑ)`.
pub fn method_condition_ratio_bound(spec: &ScalingSpec) -> Option<f64> {
    match spec {
        ScalingSpec::None => Some(1.0),
        ScalingSpec::Olovsson {
            beta,
            variant: OlovssonVariant::Original,
        } => Some(1.0 + 8.0 * beta / 7.0),
        ScalingSpec::Olovsson {
            beta,
            variant: OlovssonVariant::Projector,
        } => Some(1.0 + beta),
        ScalingSpec::Hoffmann { beta } => Some(1.0 + 4.5 * beta),
        ScalingSpec::Cms { alpha, .. } => Some(*alpha),
        _ => None,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConditionReport {
    pub kappa_m: f64,
    pub kappa_mbar: f64,
    pub kappa_pair: f64,
    /// `λ₁(M̄)` and `λₙ(M̄)`.
    pub mbar_extremes: (f64, f64),
    /// `κ(M̄)/κ(M)`.
    pub ratio: f64,
    /// `p_max · maxₑ λ_m(M̄ₑ) / minₑ λ₁(M̄ₑ)`, when `M̄` is assembled from
    /// element blocks.
    pub fried_upper: Option<f64>,
    pub method_ratio_bound: Option<f64>,
    /// `(p_max/ε) maxₑ λ_m(Mₑ)`, for eigenvalue stabilization.
    pub stabilization_upper: Option<f64>,
    pub bounds: BoundSet,
}

/// Condition numbers of `M`, `M̄` and `(M̄, M)` with the bounds that apply.
/// `mbar_m` takes the eigenvalues of `(M̄, M)` when already known.
pub fn condition_report(
    model: &FeModel,
    system: &ScaledSystem,
    mbar_m: Option<&[f64]>,
) -> Result<ConditionReport, AnalysisError> {
    let m = model.mass_matrix();
    let mbar = system.mbar.to_dense();
    let kappa_m = extreme_ratio(&sym_eigvals(&m)?)?;
    let mbar_values = sym_eigvals(&mbar)?;
    let kappa_mbar = extreme_ratio(&mbar_values)?;
    let kappa_pair = match mbar_m {
        Some(v) => extreme_ratio(v)?,
        None => extreme_ratio(&generalized_eigvals(&MatrixPair::new(mbar, m)?)?)?,
    };
    let p_max = model.mesh.p_max() as f64;
    let element_masses: Option<Vec<SymMatrix>> = match (&system.elements, &system.spec) {
        (Some(s), _) => Some(s.masses.clone()),
        (None, ScalingSpec::None) => Some(model.blocks.iter().map(|b| b.lumped_matrix()).collect()),
        _ => None,
    };
    let fried_upper = match element_masses {
        Some(masses) => {
            let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
            for me in &masses {
                let ev = sym_eigvals(me)?;
                lo = lo.min(ev[0]);
                hi = hi.max(*ev.last().unwrap());
            }
            Some(p_max * hi / lo)
        }
        None => None,
    };
    let ratio = kappa_mbar / kappa_m;
    let method_ratio_bound = method_condition_ratio_bound(&system.spec);
    let stabilization_upper = match system.spec {
        ScalingSpec::EigStabilization { epsilon, .. } if epsilon > 0.0 => {
            let top = model
                .blocks
                .iter()
                .flat_map(|b| b.lumped_mass.iter().copied())
                .fold(0.0, f64::max);
            Some(p_max / epsilon * top)
        }
        _ => None,
    };
    let mut bounds = BoundSet::default();
    bounds.push(BoundRecord::new(
        "conditioning_bound",
        f64::NEG_INFINITY,
        ratio,
        ratio,
        kappa_pair,
    ));
    if let Some(b) = fried_upper {
        bounds.push(BoundRecord::new(
            "fried_condition",
            1.0,
            kappa_mbar,
            kappa_mbar,
            b,
        ));
    }
    if let Some(b) = method_ratio_bound {
        bounds.push(BoundRecord::new(
            "method_condition_ratio",
            f64::NEG_INFINITY,
            ratio,
            ratio,
            b,
        ));
    }
    if let Some(b) = stabilization_upper {
        bounds.push(BoundRecord::new(
            "stabilization_condition",
            1.0,
            kappa_mbar,
            kappa_mbar,
            b,
        ));
    }
    if let ScalingSpec::Olovsson {
        beta,
        variant: OlovssonVariant::Original,
    } = system.spec
    {
        let (mn, mx) = min_max(model.blocks.iter().map(|b| b.element_mass));
        let explicit = p_max * (1.0 + 8.0 * beta / 7.0) * mx / mn;
        bounds.push(BoundRecord::new(
            "olovsson_explicit_condition",
            1.0,
            kappa_mbar,
            kappa_mbar,
            explicit,
        ));
    }
    Ok(ConditionReport {
        kappa_m,
        kappa_mbar,
        kappa_pair,
        mbar_extremes: (mbar_values[0], *mbar_values.last().unwrap()),
        ratio,
        fried_upper,
        method_ratio_bound,
        stabilization_upper,
        bounds,
    })
}

/// Gershgorin estimate on `M^(-1/2) K̄ M^(-1/2)` for a diagonal `M`; an upper
/// bound on `λₙ(K̄, M̄)` whenever `M̄ ⪰ M`.
pub fn gershgorin_scaled(kbar: &SymMatrix, m_diag: &[f64]) -> f64 {
    let s: Vec<f64> = m_diag.iter().map(|d| 1.0 / d.sqrt()).collect();
    gershgorin_max(&SymMatrix::from_lower_fn(kbar.order(), |i, j| {
        s[i] * kbar[(i, j)] * s[j]
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn record_slack_and_holds() {
        let r = BoundRecord::new("x", 1.0, 1.0 - 1e-12, 2.0, 2.0);
        assert!(r.holds(1e-9));
        assert!(!r.holds(1e-14));
        assert!(r.lower_slack() < 0.0 && r.upper_slack() == 0.0);
        assert!(BoundRecord::new("y", f64::NEG_INFINITY, 5.0, 5.0, f64::INFINITY).holds(0.0));
    }

    #[test]
    fn identity_and_doubled_mass_sandwich() {
        let k = SymMatrix::from_lower_fn(5, |i, j| {
            if i == j {
                2.0
            } else if i == j + 1 {
                -1.0
            } else {
                0.0
            }
        });
        let m = SymMatrix::from_diagonal(&[1.0, 2.0, 1.0, 3.0, 1.0]);
        let same = sandwich_bounds(&k, &m, &m).unwrap();
        let r = same.get("eig_bounds_ratio").unwrap();
        for v in [r.lower, r.observed_min, r.observed_max, r.upper] {
            assert!((v - 1.0).abs() < 1e-12);
        }
        let doubled = sandwich_bounds(&k, &m, &m.scaled(2.0)).unwrap();
        let r = doubled.get("eig_bounds_ratio").unwrap();
        for v in [r.lower, r.observed_min, r.observed_max, r.upper] {
            assert!((v - 2.0).abs() < 1e-12);
        }
        assert!(doubled.all_hold(1e-9));
    }

    #[test]
    fn corollary_values() {
        let olo = corollary_bound(
            &ScalingSpec::Olovsson {
                beta: 1.0,
                variant: OlovssonVariant::Original,
            },
            &[],
        )
        .unwrap();
        assert!((olo - (15.0f64 / 7.0).sqrt()).abs() < 1e-15);
        assert!((olo - 1.463850).abs() < 1e-6);
        let hof = corollary_bound(&ScalingSpec::Hoffmann { beta: 1.0 }, &[]).unwrap();
        assert!((hof - 2.345208).abs() < 1e-6);
        let cms = corollary_bound(
            &ScalingSpec::Cms {
                alpha: 1.0,
                selector: Default::default(),
            },
            &[],
        )
        .unwrap();
        assert_eq!(cms, 1.0);
        assert!(matches!(
            corollary_bound(&ScalingSpec::UniformLft { mu: 2.0 }, &[]),
            Err(AnalysisError::NoBoundForKind(_))
        ));
    }

    #[test]
    fn gershgorin_scaled_dominates() {
        let k = SymMatrix::from_lower_fn(4, |i, j| if i == j { 3.0 } else { -0.5 });
        let d = [1.0, 2.0, 0.5, 1.5];
        let top = *generalized_eigvals(
            &MatrixPair::new(k.clone(), SymMatrix::from_diagonal(&d)).unwrap(),
        )
        .unwrap()
        .last()
        .unwrap();
        assert!(gershgorin_scaled(&k, &d) >= top);
    }
}
