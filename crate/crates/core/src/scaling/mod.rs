//! Mass scaling strategies. Each produces a scaled pair `(K̄, M̄)`, either by
//! transforming the assembled pair or by modifying element masses before
//! assembly.

mod element;
mod global;
mod spec;

use std::sync::Arc;

use thiserror::Error;

use crate::fem::{assemble_local, ElementBlock, FeModel, FemError};
use crate::linalg::{
    generalized_eig, generalized_eigvals_refined, EigDecomposition, LinalgError, LowRankUpdate,
    MatrixPair, PermutedCholesky, SymMatrix, WoodburySolver,
};

pub use element::{
    cms_masses, hoffmann_block, hoffmann_masses, hoffmann_pattern, local_deflation_masses,
    olovsson_block, olovsson_masses, stabilization_masses, ElementScaling, LocalStrategy,
    CLUSTER_RTOL,
};
pub use global::{global_deflation, lft, lft_eigenvalue, polynomial_sms};
pub use spec::{DeflationMode, DofSelector, OlovssonVariant, ScalingSpec};

/// Relative threshold below which eigenvalues are polished by
/// [`generalized_eigvals_refined`].
pub const REFINE_BELOW: f64 = 1e-4;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScalingError {
    #[error("parameter {name} = {value} is outside its domain")]
    InvalidParameter { name: &'static str, value: f64 },
    #[error("the dof selector picks no entries")]
    EmptySelection,
    #[error("transform matrix is singular (det = {det})")]
    DegenerateLft { det: f64 },
    #[error("transformed mass matrix is not positive definite")]
    LostDefiniteness,
    #[error("polynomial scaling needs a diagonal mass matrix")]
    NonDiagonalMass,
    #[error("rank {rank} must be smaller than {limit}")]
    RankTooLarge { rank: usize, limit: usize },
    #[error("eigensolve of element {element} failed: {source}")]
    DefectiveElementPair { element: usize, source: LinalgError },
    #[error("expected {expected} entries, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Fem(#[from] FemError),
}

/// Storage of `M̄` chosen by the strategy.
#[derive(Clone, Debug)]
pub enum ScaledMass {
    Diagonal(Vec<f64>),
    Dense(SymMatrix),
    LowRank(LowRankUpdate),
}

impl ScaledMass {
    pub fn order(&self) -> usize {
        match self {
            ScaledMass::Diagonal(d) => d.len(),
            ScaledMass::Dense(m) => m.order(),
            ScaledMass::LowRank(u) => u.order(),
        }
    }

    pub fn to_dense(&self) -> SymMatrix {
        match self {
            ScaledMass::Diagonal(d) => SymMatrix::from_diagonal(d),
            ScaledMass::Dense(m) => m.clone(),
            ScaledMass::LowRank(u) => u.to_dense(),
        }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        match self {
            ScaledMass::Diagonal(d) => d.iter().zip(x).map(|(a, b)| a * b).collect(),
            ScaledMass::Dense(m) => m.mul_vec(x),
            ScaledMass::LowRank(u) => u.mul_vec(x),
        }
    }

    /// Factorization for repeated solves.
    pub fn solver(&self) -> Result<MassSolver, LinalgError> {
        Ok(match self {
            ScaledMass::Diagonal(d) => {
                if let Some(pivot) = d.iter().position(|&v| !(v > 0.0)) {
                    return Err(LinalgError::NotPositiveDefinite { pivot });
                }
                MassSolver::Diagonal(d.clone())
            }
            ScaledMass::Dense(m) => MassSolver::Dense(PermutedCholesky::new(m)?),
            ScaledMass::LowRank(u) => MassSolver::Woodbury(WoodburySolver::new(u)?),
        })
    }
}

/// Solves with `M̄` by the cheapest path its storage allows.
#[derive(Clone, Debug)]
pub enum MassSolver {
    Diagonal(Vec<f64>),
    Dense(PermutedCholesky),
    Woodbury(WoodburySolver),
}

impl MassSolver {
    /// Overwrites `b` with `M̄⁻¹ b`; `scratch` has the system order.
    pub fn solve_in_place(&self, b: &mut [f64], scratch: &mut [f64]) {
        match self {
            MassSolver::Diagonal(d) => b.iter_mut().zip(d).for_each(|(x, di)| *x /= di),
            MassSolver::Dense(c) => c.solve_in_place(b, scratch),
            MassSolver::Woodbury(w) => w.solve_in_place(b, scratch),
        }
    }
}

#[derive(Clone, Debug)]
pub struct ScaledSystem {
    pub spec: ScalingSpec,
    /// Same allocation as the model's `K` unless the strategy changes it.
    pub kbar: Arc<SymMatrix>,
    pub mbar: ScaledMass,
    /// Scaled element masses, for element-wise kinds.
    pub elements: Option<ElementScaling>,
}

impl ScaledSystem {
    pub fn order(&self) -> usize {
        self.kbar.order()
    }

    pub fn pair(&self) -> MatrixPair {
        MatrixPair::new(SymMatrix::clone(&self.kbar), self.mbar.to_dense()).expect("orders match")
    }

    /// `λₖ(K̄, M̄)`, ascending, with the small ones polished.
    pub fn eigenvalues(&self) -> Result<Vec<f64>, LinalgError> {
        generalized_eigvals_refined(&self.pair(), REFINE_BELOW)
    }

    /// `E = M̄ − M`.
    pub fn perturbation(&self, m: &SymMatrix) -> SymMatrix {
        self.mbar.to_dense().sub(m)
    }
}

/// Assembles element masses, staying diagonal when every block is.
pub fn assemble_masses(
    n: usize,
    blocks: &[ElementBlock],
    scaling: &ElementScaling,
) -> Result<ScaledMass, ScalingError> {
    if scaling.masses.len() != blocks.len() {
        return Err(ScalingError::DimensionMismatch {
            expected: blocks.len(),
            actual: scaling.masses.len(),
        });
    }
    if scaling.masses.iter().all(SymMatrix::is_diagonal) {
        let mut d = vec![0.0; n];
        for (b, m) in blocks.iter().zip(&scaling.masses) {
            for (a, &g) in b.dof_map.iter().enumerate() {
                if g >= n {
                    return Err(FemError::IndexOutOfRange {
                        element: 0,
                        index: g,
                        bound: n,
                    }
                    .into());
                }
                d[g] += m[(a, a)];
            }
        }
        return Ok(ScaledMass::Diagonal(d));
    }
    let parts = blocks
        .iter()
        .zip(&scaling.masses)
        .map(|(b, m)| (&b.dof_map[..], m));
    Ok(ScaledMass::Dense(assemble_local(n, parts)?))
}

/// Applies `spec` to a free-free model. `eig` is a `B`-orthonormal
/// decomposition of `(K, M)`, computed here when a global kind needs it.
pub fn apply(
    model: &FeModel,
    spec: &ScalingSpec,
    eig: Option<&EigDecomposition>,
) -> Result<ScaledSystem, ScalingError> {
    spec.validate()?;
    let n = model.dof_count();
    let k = &model.stiffness;
    let m = model.mass_matrix();
    let local = |scaling: ElementScaling| -> Result<ScaledSystem, ScalingError> {
        Ok(ScaledSystem {
            spec: spec.clone(),
            kbar: Arc::clone(k),
            mbar: assemble_masses(n, &model.blocks, &scaling)?,
            elements: Some(scaling),
        })
    };
    let global = |kbar: Arc<SymMatrix>, mbar: ScaledMass| ScaledSystem {
        spec: spec.clone(),
        kbar,
        mbar,
        elements: None,
    };
    match spec {
        ScalingSpec::None => Ok(global(
            Arc::clone(k),
            ScaledMass::Diagonal(model.lumped_mass.clone()),
        )),
        ScalingSpec::Cms { alpha, selector } => local(cms_masses(
            &model.blocks,
            &selector.local_indices()?,
            *alpha,
        )),
        ScalingSpec::UniformLft { mu } => {
            let (kbar, mbar) = lft(k, &m, [[1.0, 0.0], [0.0, *mu]])?;
            Ok(global(kbar, mbar))
        }
        ScalingSpec::StiffnessProportionalLft {
            mu,
            relative_to_lambda_max,
        } => {
            let mu = if *relative_to_lambda_max {
                let top = match eig {
                    Some(e) => e.values.last().copied(),
                    None => generalized_eigvals_refined(&model.pair(), REFINE_BELOW)?
                        .last()
                        .copied(),
                };
                mu / top.unwrap_or(1.0)
            } else {
                *mu
            };
            let (kbar, mbar) = lft(k, &m, [[1.0, mu], [0.0, 1.0]])?;
            Ok(global(kbar, mbar))
        }
        ScalingSpec::Lft { w } => {
            let (kbar, mbar) = lft(k, &m, *w)?;
            Ok(global(kbar, mbar))
        }
        ScalingSpec::PolynomialSms { c } => Ok(global(Arc::clone(k), polynomial_sms(k, &m, *c)?)),
        ScalingSpec::GlobalDeflation { rank, mode } => {
            let owned;
            let eig = match eig {
                Some(e) => e,
                None => {
                    owned = generalized_eig(&model.pair())?;
                    &owned
                }
            };
            Ok(global(
                Arc::clone(k),
                ScaledMass::LowRank(global_deflation(&m, eig, *rank, *mode)?),
            ))
        }
        ScalingSpec::LocalDeflationS1 { rank, alpha } => local(local_deflation_masses(
            &model.blocks,
            *rank,
            LocalStrategy::S1 { alpha: *alpha },
        )?),
        ScalingSpec::LocalDeflationS2 { rank } => local(local_deflation_masses(
            &model.blocks,
            *rank,
            LocalStrategy::S2,
        )?),
        ScalingSpec::Olovsson { beta, variant } => {
            local(olovsson_masses(&model.blocks, *beta, *variant))
        }
        ScalingSpec::Hoffmann { beta } => local(hoffmann_masses(&model.blocks, *beta)),
        ScalingSpec::EigStabilization { rank, epsilon } => {
            local(stabilization_masses(&model.blocks, *rank, *epsilon)?)
        }
    }
}
