//! Experiment configuration: JSON with optional per-field units.

use std::path::Path;

use massscale::fem::{build_structured_mesh, FeModel, Material};
use massscale::scaling::{DeflationMode, DofSelector, OlovssonVariant, ScalingSpec};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: String,
        source: std::io::Error,
    },
    #[error("{0}")]
    Parse(#[from] serde_json::Error),
    #[error("{field}: {message}")]
    Invalid { field: String, message: String },
}

fn invalid(field: impl Into<String>, message: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        field: field.into(),
        message: message.into(),
    }
}

/// A number in SI units, or a value with an explicit unit.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Quantity {
    Si(f64),
    WithUnit { value: f64, unit: Unit },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Unit {
    #[serde(rename = "m")]
    Metre,
    #[serde(rename = "mm")]
    Millimetre,
    #[serde(rename = "Pa")]
    Pascal,
    #[serde(rename = "MPa")]
    Megapascal,
    #[serde(rename = "GPa")]
    Gigapascal,
    #[serde(rename = "kg/m3")]
    KgPerCubicMetre,
    #[serde(rename = "t/mm3")]
    TonnePerCubicMillimetre,
    #[serde(rename = "g/cm3")]
    GramPerCubicCentimetre,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Dimension {
    Length,
    Stress,
    Density,
}

impl Unit {
    fn dimension(self) -> Dimension {
        match self {
            Unit::Metre | Unit::Millimetre => Dimension::Length,
            Unit::Pascal | Unit::Megapascal | Unit::Gigapascal => Dimension::Stress,
            _ => Dimension::Density,
        }
    }

    fn factor(self) -> f64 {
        match self {
            Unit::Metre | Unit::Pascal | Unit::KgPerCubicMetre => 1.0,
            Unit::Millimetre => 1e-3,
            Unit::Megapascal => 1e6,
            Unit::Gigapascal => 1e9,
            Unit::TonnePerCubicMillimetre => 1e12,
            Unit::GramPerCubicCentimetre => 1e3,
        }
    }
}

impl Quantity {
    fn si(self, field: &str, dim: Dimension) -> Result<f64, ConfigError> {
        let v = match self {
            Quantity::Si(v) => v,
            Quantity::WithUnit { value, unit } => {
                if unit.dimension() != dim {
                    return Err(invalid(
                        field,
                        format!("unit {unit:?} does not measure {dim:?}"),
                    ));
                }
                value * unit.factor()
            }
        };
        if !(v.is_finite() && v > 0.0) {
            return Err(invalid(
                field,
                format!("must be positive and finite, got {v}"),
            ));
        }
        Ok(v)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Geometry {
    /// Structured box mesh with `nodes` per direction.
    Plate {
        nodes: [usize; 3],
        extents: [Quantity; 3],
    },
    /// A single hexahedral element.
    Element { extents: [Quantity; 3] },
    /// Spring-mass oscillator, for integrator checks only.
    Sdof { stiffness: f64, mass: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialConfig {
    pub young_modulus: Quantity,
    pub poisson_ratio: f64,
    pub density: Quantity,
}

impl Default for MaterialConfig {
    fn default() -> Self {
        Self {
            young_modulus: Quantity::WithUnit {
                value: 207.0,
                unit: Unit::Gigapascal,
            },
            poisson_ratio: 0.3,
            density: Quantity::Si(7800.0),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SweepConfig {
    Olovsson {
        betas: Vec<f64>,
        #[serde(default)]
        variant: OlovssonVariant,
    },
    Hoffmann {
        betas: Vec<f64>,
    },
    Cms {
        alphas: Vec<f64>,
        #[serde(default)]
        selector: DofSelector,
    },
    LocalDeflationS1 {
        rank: usize,
        alphas: Vec<f64>,
    },
    LocalDeflationS2 {
        ranks: Vec<usize>,
    },
    GlobalDeflation {
        ranks: Vec<usize>,
        #[serde(default)]
        mode: DeflationMode,
    },
}

impl SweepConfig {
    pub fn name(&self) -> &'static str {
        match self {
            SweepConfig::Olovsson { .. } => "olovsson",
            SweepConfig::Hoffmann { .. } => "hoffmann",
            SweepConfig::Cms { .. } => "cms",
            SweepConfig::LocalDeflationS1 { .. } => "local_deflation_s1",
            SweepConfig::LocalDeflationS2 { .. } => "local_deflation_s2",
            SweepConfig::GlobalDeflation { .. } => "global_deflation",
        }
    }

    /// Name of the swept parameter.
    pub fn parameter(&self) -> &'static str {
        match self {
            SweepConfig::Olovsson { .. } | SweepConfig::Hoffmann { .. } => "beta",
            SweepConfig::Cms { .. } | SweepConfig::LocalDeflationS1 { .. } => "alpha",
            SweepConfig::LocalDeflationS2 { .. } | SweepConfig::GlobalDeflation { .. } => "rank",
        }
    }

    fn grid_field(&self) -> &'static str {
        match self.parameter() {
            "beta" => "betas",
            "alpha" => "alphas",
            _ => "ranks",
        }
    }

    /// `(parameter value, spec)` per grid point.
    pub fn points(&self) -> Vec<(f64, ScalingSpec)> {
        match self {
            SweepConfig::Olovsson { betas, variant } => betas
                .iter()
                .map(|&beta| {
                    (
                        beta,
                        ScalingSpec::Olovsson {
                            beta,
                            variant: *variant,
                        },
                    )
                })
                .collect(),
            SweepConfig::Hoffmann { betas } => betas
                .iter()
                .map(|&beta| (beta, ScalingSpec::Hoffmann { beta }))
                .collect(),
            SweepConfig::Cms { alphas, selector } => alphas
                .iter()
                .map(|&alpha| {
                    (
                        alpha,
                        ScalingSpec::Cms {
                            alpha,
                            selector: selector.clone(),
                        },
                    )
                })
                .collect(),
            SweepConfig::LocalDeflationS1 { rank, alphas } => alphas
                .iter()
                .map(|&alpha| (alpha, ScalingSpec::LocalDeflationS1 { rank: *rank, alpha }))
                .collect(),
            SweepConfig::LocalDeflationS2 { ranks } => ranks
                .iter()
                .map(|&rank| (rank as f64, ScalingSpec::LocalDeflationS2 { rank }))
                .collect(),
            SweepConfig::GlobalDeflation { ranks, mode } => ranks
                .iter()
                .map(|&rank| {
                    (
                        rank as f64,
                        ScalingSpec::GlobalDeflation { rank, mode: *mode },
                    )
                })
                .collect(),
        }
    }

    fn grid_len(&self) -> usize {
        match self {
            SweepConfig::Olovsson { betas, .. } | SweepConfig::Hoffmann { betas } => betas.len(),
            SweepConfig::Cms { alphas, .. } | SweepConfig::LocalDeflationS1 { alphas, .. } => {
                alphas.len()
            }
            SweepConfig::LocalDeflationS2 { ranks }
            | SweepConfig::GlobalDeflation { ranks, .. } => ranks.len(),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Studies {
    /// Element spectra and Rayleigh tables.
    pub element: bool,
    /// Global spectra and frequency-ratio curves.
    pub global: bool,
    /// Sandwich, element and condition-number bounds.
    pub condition: bool,
    /// Empirical critical-step brackets.
    pub stability: bool,
    /// Per-step CSV trace of the stable bracket run.
    pub trace: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub geometry: Geometry,
    #[serde(default)]
    pub material: MaterialConfig,
    #[serde(default)]
    pub scalings: Vec<ScalingSpec>,
    #[serde(default)]
    pub sweeps: Vec<SweepConfig>,
    #[serde(default)]
    pub studies: Studies,
    pub seed: Option<u64>,
    pub output: Option<String>,
    /// Steps per bracket run; the protocol uses 10⁴.
    pub bracket_steps: Option<usize>,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.display().to_string(),
            source,
        })?;
        let cfg: Self = serde_json::from_str(&text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        match &self.geometry {
            Geometry::Plate { nodes, extents } => {
                for (i, &c) in nodes.iter().enumerate() {
                    if c < 2 {
                        return Err(invalid(
                            format!("geometry.nodes[{i}]"),
                            format!("need at least 2, got {c}"),
                        ));
                    }
                }
                for (i, q) in extents.iter().enumerate() {
                    q.si(&format!("geometry.extents[{i}]"), Dimension::Length)?;
                }
            }
            Geometry::Element { extents } => {
                for (i, q) in extents.iter().enumerate() {
                    q.si(&format!("geometry.extents[{i}]"), Dimension::Length)?;
                }
            }
            Geometry::Sdof { stiffness, mass } => {
                if !(stiffness.is_finite() && *stiffness > 0.0) {
                    return Err(invalid(
                        "geometry.stiffness",
                        format!("must be positive, got {stiffness}"),
                    ));
                }
                if !(mass.is_finite() && *mass > 0.0) {
                    return Err(invalid(
                        "geometry.mass",
                        format!("must be positive, got {mass}"),
                    ));
                }
                if self.studies.element
                    || self.studies.global
                    || self.studies.condition
                    || !self.sweeps.is_empty()
                {
                    return Err(invalid(
                        "studies",
                        "a spring-mass geometry only supports the stability study",
                    ));
                }
            }
        }
        self.material()?;
        for (i, s) in self.scalings.iter().enumerate() {
            s.validate()
                .map_err(|e| invalid(format!("scalings[{i}]"), e.to_string()))?;
        }
        for (i, sw) in self.sweeps.iter().enumerate() {
            let field = format!("sweeps[{i}].{}", sw.grid_field());
            if sw.grid_len() == 0 {
                return Err(invalid(field, "sweep grid is empty"));
            }
            for (_, spec) in sw.points() {
                spec.validate()
                    .map_err(|e| invalid(field.clone(), e.to_string()))?;
            }
        }
        if self.bracket_steps == Some(0) {
            return Err(invalid("bracket_steps", "must be positive"));
        }
        Ok(())
    }

    pub fn material(&self) -> Result<Material, ConfigError> {
        let m = &self.material;
        let e = m
            .young_modulus
            .si("material.young_modulus", Dimension::Stress)?;
        let rho = m.density.si("material.density", Dimension::Density)?;
        Material::new(e, m.poisson_ratio, rho).map_err(|err| invalid("material", err.to_string()))
    }

    /// The finite element model, or `None` for a spring-mass geometry.
    pub fn model(&self) -> Result<Option<FeModel>, ConfigError> {
        let extents = |q: &[Quantity; 3]| -> Result<(f64, f64, f64), ConfigError> {
            Ok((
                q[0].si("geometry.extents[0]", Dimension::Length)?,
                q[1].si("geometry.extents[1]", Dimension::Length)?,
                q[2].si("geometry.extents[2]", Dimension::Length)?,
            ))
        };
        let mesh = match &self.geometry {
            Geometry::Plate { nodes, extents: e } => {
                build_structured_mesh((nodes[0], nodes[1], nodes[2]), extents(e)?)
            }
            Geometry::Element { extents: e } => build_structured_mesh((2, 2, 2), extents(e)?),
            Geometry::Sdof { .. } => return Ok(None),
        }
        .map_err(|err| invalid("geometry", err.to_string()))?;
        let material = self.material()?;
        FeModel::uniform(mesh, material)
            .map(Some)
            .map_err(|err| invalid("geometry", err.to_string()))
    }
}
