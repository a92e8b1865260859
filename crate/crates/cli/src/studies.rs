//! The studies behind each subcommand, writing through one [`Emitter`].

use std::sync::Arc;

use massscale::analysis::{
    asymptotic_cond_rate, condition_report, corollary_bound, critical_dt, element_rayleigh_report,
    fit_slope, fried, irons_wathen, ratio_curve_csv, report_from_spectra, AnalysisError,
    ConditionReport, ElementRayleighReport, ReportOptions, SpectralReport,
};
use massscale::fem::{FeModel, Mesh};
use massscale::integrator::{
    bracket_with_steps, Bracket, CentralDifference, IntegratorError, RunOptions, BRACKET_STEPS,
    STABLE_FACTOR,
};
use massscale::linalg::{
    generalized_eig, generalized_eigvals, generalized_eigvals_refined, refine_low_eigenvalues,
    sym_eigvals, EigDecomposition, LinalgError, MatrixPair, SymMatrix,
};
use massscale::scaling::{
    apply, OlovssonVariant, ScaledMass, ScaledSystem, ScalingError, ScalingSpec, REFINE_BELOW,
};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::config::{ConfigError, ExperimentConfig, Geometry, SweepConfig};
use crate::emit::Emitter;

#[derive(Debug, Error)]
pub enum AppError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error(transparent)]
    Scaling(#[from] ScalingError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Integrator(#[from] IntegratorError),
}

#[derive(Clone, Copy, Debug, Default)]
pub struct Sections {
    pub element: bool,
    pub spectrum: bool,
    pub bounds: bool,
    pub sweep: bool,
    pub integrate: bool,
}

fn f(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt(x: Option<f64>) -> String {
    x.map(f).unwrap_or_default()
}

pub struct Study<'a> {
    cfg: &'a ExperimentConfig,
    model: Option<FeModel>,
    seed: u64,
    eig: Option<EigDecomposition>,
}

impl<'a> Study<'a> {
    pub fn new(cfg: &'a ExperimentConfig, seed: u64) -> Result<Self, AppError> {
        Ok(Self {
            cfg,
            model: cfg.model()?,
            seed,
            eig: None,
        })
    }

    fn scalings(&self) -> Vec<ScalingSpec> {
        if self.cfg.scalings.is_empty() {
            vec![ScalingSpec::None]
        } else {
            self.cfg.scalings.clone()
        }
    }

    fn model(&self) -> &FeModel {
        self.model
            .as_ref()
            .expect("validated: mesh studies need a mesh geometry")
    }

    fn steps(&self) -> usize {
        self.cfg.bracket_steps.unwrap_or(BRACKET_STEPS)
    }

    /// `(K, M)` eigenpairs, computed once.
    fn original(&mut self) -> Result<&EigDecomposition, AppError> {
        if self.eig.is_none() {
            let pair = self.model().pair();
            let mut eig = generalized_eig(&pair)?;
            refine_low_eigenvalues(&pair, &mut eig, REFINE_BELOW)?;
            self.eig = Some(eig);
        }
        Ok(self.eig.as_ref().unwrap())
    }

    pub fn run(&mut self, sections: Sections, out: &mut Emitter) -> Result<(), AppError> {
        if self.model.is_some() {
            if sections.element {
                out.time("element", |out| self.element(out))?;
            }
            if sections.spectrum {
                out.time("spectrum", |out| self.spectrum(out))?;
            }
            if sections.bounds {
                out.time("bounds", |out| self.bounds(out))?;
            }
            if sections.sweep {
                out.time("sweep", |out| self.sweeps(out))?;
            }
        }
        if sections.integrate {
            out.time("integrate", |out| self.integrate(out))?;
        }
        Ok(())
    }

    fn element(&mut self, out: &mut Emitter) -> Result<(), AppError> {
        let model = self.model();
        let g = model.blocks[0].geometry;
        let mesh = Mesh::new(g.corners.to_vec(), vec![[0, 1, 2, 3, 4, 5, 6, 7]])
            .map_err(|e| AppError::Analysis(AnalysisError::Fem(e)))?;
        let element = FeModel::uniform(mesh, self.cfg.material()?)
            .map_err(|e| AppError::Analysis(e.into()))?;
        let block = &element.blocks[0];
        for spec in self.scalings() {
            let system = apply(&element, &spec, None)?;
            let mbar = system.mbar.to_dense();
            let lambda = generalized_eigvals_refined(&block.lumped_pair(), REFINE_BELOW)?;
            let lambda_bar = system.eigenvalues()?;
            let mass_eigenvalues =
                generalized_eigvals(&MatrixPair::new(mbar.clone(), block.lumped_matrix())?)?;
            let keeps_k = Arc::ptr_eq(&system.kbar, &element.stiffness);
            let rayleigh = if keeps_k {
                Some(element_rayleigh_report(block, &mbar)?)
            } else {
                None
            };
            let stem = spec.label();
            let mut csv = String::from("mode,lambda,lambda_bar,mass_ratio\n");
            for k in 0..lambda.len() {
                csv.push_str(&format!(
                    "{},{},{},{}\n",
                    k + 1,
                    f(lambda[k]),
                    f(lambda_bar[k]),
                    f(mass_eigenvalues[k])
                ));
            }
            let name = out.unique("element", &stem, "csv");
            out.write(&name, &csv)?;
            if let Some(r) = &rayleigh {
                let name = out.unique("element", &format!("{stem}_rayleigh"), "csv");
                out.write(&name, &r.to_csv())?;
            }
            let report = ElementStudy {
                spec: spec.clone(),
                lambda,
                lambda_bar,
                mass_eigenvalues,
                corollary_bound: corollary_bound(&spec, &element.blocks).ok(),
                rayleigh,
            };
            let name = out.unique("element", &stem, "json");
            out.write_json(&name, &report)?;
        }
        Ok(())
    }

    fn spectrum(&mut self, out: &mut Emitter) -> Result<(), AppError> {
        let orig = self.original()?.values.clone();
        let mut csv = String::from("mode,lambda,omega\n");
        for (k, l) in orig.iter().enumerate() {
            csv.push_str(&format!("{},{},{}\n", k + 1, f(*l), f(l.max(0.0).sqrt())));
        }
        out.write("spectrum/original.csv", &csv)?;
        for spec in self.scalings() {
            let report = self.report(&spec, ReportOptions::default())?;
            let stem = report.label.clone();
            let name = out.unique("spectrum", &format!("{stem}_ratio"), "csv");
            out.write(&name, &ratio_curve_csv(&report.ratio_curve))?;
            let name = out.unique("spectrum", &stem, "json");
            out.write_json(&name, &report)?;
        }
        Ok(())
    }

    fn report(
        &mut self,
        spec: &ScalingSpec,
        options: ReportOptions,
    ) -> Result<SpectralReport, AppError> {
        self.original()?;
        let (eig, model) = (self.eig.as_ref().unwrap(), self.model());
        let system = apply(model, spec, Some(eig))?;
        let scaled = system.eigenvalues()?;
        Ok(report_from_spectra(
            model,
            &system,
            &eig.values,
            scaled,
            options,
        )?)
    }

    fn bounds(&mut self, out: &mut Emitter) -> Result<(), AppError> {
        let orig = self.original()?.values.clone();
        let model = self.model();
        let masses: Vec<SymMatrix> = model.blocks.iter().map(|b| b.lumped_matrix()).collect();
        let mut summary = BoundsSummary {
            irons_wathen: irons_wathen(&model.blocks, None, &orig)?,
            fried_mass: fried(
                &masses,
                &sym_eigvals(&model.mass_matrix())?,
                model.mesh.p_max(),
            )?,
            p_max: model.mesh.p_max(),
            asymptotic_rate: asymptotic_cond_rate(model).ok(),
        };
        summary
            .fried_mass
            .records
            .iter_mut()
            .for_each(|r| r.source = format!("mass_{}", r.source));
        out.write_json("bounds/original.json", &summary)?;
        for spec in self.scalings() {
            let report = self.report(
                &spec,
                ReportOptions {
                    sandwich: true,
                    condition: true,
                },
            )?;
            let name = out.unique("bounds", &report.label.clone(), "json");
            out.write_json(&name, &report)?;
        }
        Ok(())
    }

    fn sweeps(&mut self, out: &mut Emitter) -> Result<(), AppError> {
        self.original()?;
        let eig = self.eig.as_ref().unwrap();
        let condition = self.cfg.studies.condition;
        let stability = self.cfg.studies.stability;
        let (seed, steps) = (self.seed, self.steps());
        let model = self.model();
        for (i, sweep) in self.cfg.sweeps.iter().enumerate() {
            let points: Vec<(f64, ScalingSpec)> = sweep.points();
            let rows: Vec<SweepPoint> = points
                .par_iter()
                .map(|(param, spec)| {
                    sweep_point(model, eig, *param, spec, condition, stability, seed, steps)
                })
                .collect::<Result<_, AppError>>()?;
            let stem = format!("{i:02}_{}", sweep.name());
            let name = out.unique("sweep", &stem, "csv");
            out.write(&name, &sweep_csv(sweep, &rows))?;
            let summary = sweep_summary(model, sweep, rows, condition)?;
            let name = out.unique("sweep", &stem, "json");
            out.write_json(&name, &summary)?;
        }
        Ok(())
    }

    fn integrate(&mut self, out: &mut Emitter) -> Result<(), AppError> {
        let (steps, seed) = (self.steps(), self.seed);
        let trace = self.cfg.studies.trace;
        let mut csv = String::from(
            "label,dt_estimate,below_dt,below,below_peak,above_dt,above,above_peak,seed\n",
        );
        let mut emit = |out: &mut Emitter,
                        label: &str,
                        k: &SymMatrix,
                        mbar: &ScaledMass,
                        dt: f64|
         -> Result<(), AppError> {
            let bracket = bracket_with_steps(k, mbar, dt, seed, steps)?;
            csv.push_str(&bracket_row(label, &bracket));
            let name = out.unique("integrate", label, "json");
            out.write_json(&name, &bracket)?;
            if trace {
                let cd = CentralDifference::new(k, mbar)?;
                let (u0, _) = cd.initial_displacement(seed)?;
                let run = cd.run(
                    &u0,
                    &vec![0.0; u0.len()],
                    STABLE_FACTOR * dt,
                    steps,
                    &RunOptions::default(),
                )?;
                let name = out.unique("integrate", &format!("{label}_trace"), "csv");
                out.write(&name, &run.trace_csv())?;
            }
            Ok(())
        };
        if let Geometry::Sdof { stiffness, mass } = self.cfg.geometry {
            let dt = critical_dt(stiffness / mass)?;
            emit(
                out,
                "sdof",
                &SymMatrix::from_diagonal(&[stiffness]),
                &ScaledMass::Diagonal(vec![mass]),
                dt,
            )?;
        } else {
            self.original()?;
            let (eig, model) = (self.eig.as_ref().unwrap(), self.model());
            for spec in self.scalings() {
                let system = apply(model, &spec, Some(eig))?;
                let top = *system.eigenvalues()?.last().expect("nonempty");
                emit(
                    out,
                    &spec.label(),
                    &system.kbar,
                    &system.mbar,
                    critical_dt(top)?,
                )?;
            }
        }
        out.write("integrate/brackets.csv", &csv)?;
        Ok(())
    }
}

fn bracket_row(label: &str, b: &Bracket) -> String {
    let class = |v: &massscale::integrator::StabilityVerdict| {
        format!("{:?}", v.classification).to_lowercase()
    };
    format!(
        "{label},{},{},{},{},{},{},{},{}\n",
        f(b.dt_estimate),
        f(b.below.dt),
        class(&b.below),
        f(b.below.peak),
        f(b.above.dt),
        class(&b.above),
        f(b.above.peak),
        b.seed
    )
}

#[derive(Serialize)]
struct ElementStudy {
    spec: ScalingSpec,
    lambda: Vec<f64>,
    lambda_bar: Vec<f64>,
    /// `λ(M̄ₑ, Mₑ)`.
    mass_eigenvalues: Vec<f64>,
    corollary_bound: Option<f64>,
    rayleigh: Option<ElementRayleighReport>,
}

#[derive(Serialize)]
struct BoundsSummary {
    irons_wathen: massscale::analysis::BoundRecord,
    fried_mass: massscale::analysis::BoundSet,
    p_max: usize,
    asymptotic_rate: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepPoint {
    pub parameter: f64,
    pub label: String,
    pub dt_ratio: f64,
    pub bound: Option<f64>,
    pub max_ratio: f64,
    pub min_ratio: f64,
    pub condition: Option<ConditionReport>,
    pub bracket: Option<Bracket>,
}

#[allow(clippy::too_many_arguments)]
fn sweep_point(
    model: &FeModel,
    eig: &EigDecomposition,
    parameter: f64,
    spec: &ScalingSpec,
    condition: bool,
    stability: bool,
    seed: u64,
    steps: usize,
) -> Result<SweepPoint, AppError> {
    let system: ScaledSystem = apply(model, spec, Some(eig))?;
    let scaled = system.eigenvalues()?;
    let report = report_from_spectra(
        model,
        &system,
        &eig.values,
        scaled,
        ReportOptions::default(),
    )?;
    let condition = if condition {
        Some(condition_report(model, &system, None)?)
    } else {
        None
    };
    let bracket = if stability {
        Some(bracket_with_steps(
            &system.kbar,
            &system.mbar,
            report.scaled_critical_dt,
            seed,
            steps,
        )?)
    } else {
        None
    };
    Ok(SweepPoint {
        parameter,
        label: report.label,
        dt_ratio: report.dt_ratio,
        bound: report.corollary_bound,
        max_ratio: report.max_ratio,
        min_ratio: report.min_ratio,
        condition,
        bracket,
    })
}

fn sweep_csv(sweep: &SweepConfig, rows: &[SweepPoint]) -> String {
    let mut s = format!(
        "{},dt_ratio,bound,dt_ratio_over_bound,max_ratio,min_ratio,kappa_m,kappa_mbar,kappa_ratio,kappa_pair,kappa_ratio_bound,below,above\n",
        sweep.parameter()
    );
    for r in rows {
        let c = r.condition.as_ref();
        let verdict = |above: bool| {
            r.bracket
                .as_ref()
                .map(|b| {
                    let v = if above { &b.above } else { &b.below };
                    format!("{:?}", v.classification).to_lowercase()
                })
                .unwrap_or_default()
        };
        s.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            f(r.parameter),
            f(r.dt_ratio),
            opt(r.bound),
            opt(r.bound.map(|b| r.dt_ratio / b)),
            f(r.max_ratio),
            f(r.min_ratio),
            opt(c.map(|c| c.kappa_m)),
            opt(c.map(|c| c.kappa_mbar)),
            opt(c.map(|c| c.ratio)),
            opt(c.map(|c| c.kappa_pair)),
            opt(c.and_then(|c| c.method_ratio_bound)),
            verdict(false),
            verdict(true),
        ));
    }
    s
}

#[derive(Serialize)]
struct SweepSummary<'a> {
    sweep: &'a SweepConfig,
    points: Vec<SweepPoint>,
    /// Least-squares slope of `κ(M̄)/κ(M)` over the largest parameters.
    kappa_slope: Option<f64>,
    /// `8n/(7mN)`, for Olovsson sweeps on uniform meshes.
    asymptotic_rate: Option<f64>,
}

fn sweep_summary<'a>(
    model: &FeModel,
    sweep: &'a SweepConfig,
    points: Vec<SweepPoint>,
    condition: bool,
) -> Result<SweepSummary<'a>, AppError> {
    let kappa_slope = if condition && points.len() >= 2 {
        let x: Vec<f64> = points.iter().map(|p| p.parameter).collect();
        let y: Vec<f64> = points
            .iter()
            .filter_map(|p| p.condition.as_ref().map(|c| c.ratio))
            .collect();
        Some(fit_slope(&x, &y)?)
    } else {
        None
    };
    let asymptotic_rate = if matches!(
        sweep,
        SweepConfig::Olovsson {
            variant: OlovssonVariant::Original,
            ..
        }
    ) {
        asymptotic_cond_rate(model).ok()
    } else {
        None
    };
    Ok(SweepSummary {
        sweep,
        points,
        kappa_slope,
        asymptotic_rate,
    })
}
