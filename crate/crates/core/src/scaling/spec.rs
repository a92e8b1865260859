//! Serializable description of a scaling strategy.

use serde::{Deserialize, Serialize};

use super::ScalingError;
use crate::fem::ELEMENT_DOFS;

/// Element-local dofs touched by conventional mass scaling.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DofSelector {
    #[default]
    All,
    /// Local indices `c * 8 + a`.
    Local(Vec<usize>),
    /// Every node's dof in direction `0..3`.
    Component(usize),
}

impl DofSelector {
    /// Sorted, deduplicated local indices.
    pub fn local_indices(&self) -> Result<Vec<usize>, ScalingError> {
        let mut idx = match self {
            DofSelector::All => (0..ELEMENT_DOFS).collect(),
            DofSelector::Local(v) => v.clone(),
            DofSelector::Component(c) => {
                if *c >= 3 {
                    return Err(ScalingError::InvalidParameter {
                        name: "selector.component",
                        value: *c as f64,
                    });
                }
                (c * 8..c * 8 + 8).collect()
            }
        };
        idx.sort_unstable();
        idx.dedup();
        if let Some(&bad) = idx.iter().find(|&&i| i >= ELEMENT_DOFS) {
            return Err(ScalingError::InvalidParameter {
                name: "selector.local",
                value: bad as f64,
            });
        }
        if idx.is_empty() {
            return Err(ScalingError::EmptySelection);
        }
        Ok(idx)
    }
}

/// How the top `r` eigenvalues are moved by global deflation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DeflationMode {
    /// Flatten onto `λ_{n−r}`.
    #[default]
    Shave,
    /// Divide by `1 + α`.
    Cutoff { alpha: f64 },
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OlovssonVariant {
    /// `(βmₑ/56)(8I − eeᵀ)`; β = 1 doubles the lumped diagonal.
    #[default]
    Original,
    /// `(βmₑ/8)(I − uuᵀ)` with `u` the unit vector of ones.
    Projector,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ScalingSpec {
    None,
    Cms {
        alpha: f64,
        #[serde(default)]
        selector: DofSelector,
    },
    /// `W = [[1, 0], [0, μ]]`.
    UniformLft {
        mu: f64,
    },
    /// `W = [[1, μ], [0, 1]]`. With `relative_to_lambda_max` the given value is
    /// divided by `λₙ(K, M)`.
    StiffnessProportionalLft {
        mu: f64,
        #[serde(default)]
        relative_to_lambda_max: bool,
    },
    /// General transform, `w[row][col]`.
    Lft {
        w: [[f64; 2]; 2],
    },
    PolynomialSms {
        c: f64,
    },
    GlobalDeflation {
        rank: usize,
        #[serde(default)]
        mode: DeflationMode,
    },
    LocalDeflationS1 {
        rank: usize,
        alpha: f64,
    },
    LocalDeflationS2 {
        rank: usize,
    },
    Olovsson {
        beta: f64,
        #[serde(default)]
        variant: OlovssonVariant,
    },
    Hoffmann {
        beta: f64,
    },
    EigStabilization {
        rank: usize,
        epsilon: f64,
    },
}

fn check(name: &'static str, value: f64, ok: bool) -> Result<(), ScalingError> {
    if ok && value.is_finite() {
        Ok(())
    } else {
        Err(ScalingError::InvalidParameter { name, value })
    }
}

impl ScalingSpec {
    /// Short label used in file names and reports.
    pub fn label(&self) -> String {
        match self {
            ScalingSpec::None => "none".into(),
            ScalingSpec::Cms { alpha, .. } => format!("cms_alpha{alpha}"),
            ScalingSpec::UniformLft { mu } => format!("uniform_lft_mu{mu}"),
            ScalingSpec::StiffnessProportionalLft { mu, .. } => format!("stiffness_lft_mu{mu}"),
            ScalingSpec::Lft { .. } => "lft".into(),
            ScalingSpec::PolynomialSms { c } => format!("polynomial_c{c}"),
            ScalingSpec::GlobalDeflation { rank, .. } => format!("global_deflation_r{rank}"),
            ScalingSpec::LocalDeflationS1 { rank, alpha } => {
                format!("local_s1_r{rank}_alpha{alpha}")
            }
            ScalingSpec::LocalDeflationS2 { rank } => format!("local_s2_r{rank}"),
            ScalingSpec::Olovsson { beta, .. } => format!("olovsson_beta{beta}"),
            ScalingSpec::Hoffmann { beta } => format!("hoffmann_beta{beta}"),
            ScalingSpec::EigStabilization { rank, epsilon } => {
                format!("stabilization_r{rank}_eps{epsilon}")
            }
        }
    }

    /// Checks parameter domains that do not depend on the model.
    pub fn validate(&self) -> Result<(), ScalingError> {
        let local_rank = |rank: usize| {
            if rank >= ELEMENT_DOFS {
                Err(ScalingError::RankTooLarge {
                    rank,
                    limit: ELEMENT_DOFS,
                })
            } else {
                Ok(())
            }
        };
        match self {
            ScalingSpec::None => Ok(()),
            ScalingSpec::Cms { alpha, selector } => {
                check("alpha", *alpha, *alpha >= 1.0)?;
                selector.local_indices().map(|_| ())
            }
            ScalingSpec::UniformLft { mu } => check("mu", *mu, *mu > 0.0),
            ScalingSpec::StiffnessProportionalLft { mu, .. } => check("mu", *mu, *mu >= 0.0),
            ScalingSpec::Lft { w } => w.iter().flatten().try_for_each(|&v| check("w", v, true)),
            ScalingSpec::PolynomialSms { c } => check("c", *c, *c >= 0.0),
            ScalingSpec::GlobalDeflation { mode, .. } => match mode {
                DeflationMode::Shave => Ok(()),
                DeflationMode::Cutoff { alpha } => check("alpha", *alpha, *alpha >= 0.0),
            },
            ScalingSpec::LocalDeflationS1 { rank, alpha } => {
                check("alpha", *alpha, *alpha >= 0.0)?;
                local_rank(*rank)
            }
            ScalingSpec::LocalDeflationS2 { rank } => local_rank(*rank),
            ScalingSpec::Olovsson { beta, .. } | ScalingSpec::Hoffmann { beta } => {
                check("beta", *beta, *beta >= 0.0)
            }
            ScalingSpec::EigStabilization { rank, epsilon } => {
                check("epsilon", *epsilon, *epsilon >= 0.0)?;
                local_rank(*rank)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip() {
        let specs = [
            ScalingSpec::None,
            ScalingSpec::Cms {
                alpha: 4.0,
                selector: DofSelector::Component(2),
            },
            ScalingSpec::GlobalDeflation {
                rank: 20,
                mode: DeflationMode::Cutoff { alpha: 3.0 },
            },
            ScalingSpec::Olovsson {
                beta: 1.0,
                variant: OlovssonVariant::Projector,
            },
            ScalingSpec::Lft {
                w: [[1.0, 0.5], [0.0, 1.0]],
            },
        ];
        for s in specs {
            let text = serde_json::to_string(&s).unwrap();
            assert_eq!(serde_json::from_str::<ScalingSpec>(&text).unwrap(), s);
        }
    }

    #[test]
    fn defaults_from_json() {
        let s: ScalingSpec = serde_json::from_str(r#"{"kind": "olovsson", "beta": 10}"#).unwrap();
        assert_eq!(
            s,
            ScalingSpec::Olovsson {
                beta: 10.0,
                variant: OlovssonVariant::Original
            }
        );
        let s: ScalingSpec =
            serde_json::from_str(r#"{"kind": "global_deflation", "rank": 3}"#).unwrap();
        assert_eq!(
            s,
            ScalingSpec::GlobalDeflation {
                rank: 3,
                mode: DeflationMode::Shave
            }
        );
        assert!(
            serde_json::from_str::<ScalingSpec>(r#"{"kind": "hoffmann", "gamma": 1}"#).is_err()
        );
    }

    #[test]
    fn parameter_domains() {
        assert!(ScalingSpec::Cms {
            alpha: 0.5,
            selector: DofSelector::All
        }
        .validate()
        .is_err());
        assert!(matches!(
            ScalingSpec::Cms {
                alpha: 2.0,
                selector: DofSelector::Local(vec![])
            }
            .validate(),
            Err(ScalingError::EmptySelection)
        ));
        assert!(matches!(
            ScalingSpec::LocalDeflationS2 { rank: 24 }.validate(),
            Err(ScalingError::RankTooLarge {
                rank: 24,
                limit: 24
            })
        ));
        assert!(ScalingSpec::Hoffmann { beta: f64::NAN }.validate().is_err());
        assert!(ScalingSpec::Olovsson {
            beta: 0.0,
            variant: OlovssonVariant::Original
        }
        .validate()
        .is_ok());
    }
}
