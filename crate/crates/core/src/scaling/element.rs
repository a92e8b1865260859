//! Element-wise scalings `M̄ₑ = Mₑ + Eₑ`, assembled afterwards.

use super::{OlovssonVariant, ScalingError};
use crate::fem::{ElementBlock, ELEMENT_DOFS, NODES};
use crate::linalg::{generalized_eig, sym_eig, DenseMatrix, SymMatrix};

/// Eigenvalues within this fraction of the element's largest eigenvalue are
/// treated as one repeated eigenvalue.
pub const CLUSTER_RTOL: f64 = 1e-9;

/// Scaled element masses with the rank actually used per element.
#[derive(Clone, Debug)]
pub struct ElementScaling {
    pub masses: Vec<SymMatrix>,
    /// Deflated (or stabilized) rank per element after widening to whole
    /// eigenvalue clusters; empty for kinds without a rank.
    pub ranks: Vec<usize>,
}

/// `I₃ ⊗ e` for an 8×8 nodal block.
fn kron_i3(e: &[[f64; NODES]; NODES]) -> SymMatrix {
    SymMatrix::from_lower_fn(ELEMENT_DOFS, |i, j| {
        if i / NODES == j / NODES {
            e[i % NODES][j % NODES]
        } else {
            0.0
        }
    })
}

/// Olovsson scaling matrix `Eₑ` for an element of mass `mₑ`.
pub fn olovsson_block(element_mass: f64, beta: f64, variant: OlovssonVariant) -> SymMatrix {
    let s = match variant {
        OlovssonVariant::Original => beta * element_mass / 56.0,
        OlovssonVariant::Projector => beta * element_mass / 64.0,
    };
    let mut e = [[-s; NODES]; NODES];
    for (i, row) in e.iter_mut().enumerate() {
        row[i] = 7.0 * s;
    }
    kron_i3(&e)
}

/// `A ⊗ G` on the 8 nodes: `A` couples the two node layers (bottom face
/// `0..4`, top face `4..8`) and `G` the four corners of a face.
pub fn hoffmann_pattern() -> [[f64; NODES]; NODES] {
    let mut p = [[0.0; NODES]; NODES];
    for (i, row) in p.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            let a = if i / 4 == j / 4 { 1.0 } else { -1.0 };
            let g = match (i % 4).abs_diff(j % 4) {
                0 => 4.0,
                2 => 1.0,
                _ => 2.0,
            };
            *v = a * g;
        }
    }
    p
}

/// Hoffmann scaling matrix `(βγ̃/4) I₃ ⊗ (A ⊗ G)` with `γ̃ = mₑ/8`.
pub fn hoffmann_block(element_mass: f64, beta: f64) -> SymMatrix {
    let s = beta * element_mass / 32.0;
    let mut p = hoffmann_pattern();
    p.iter_mut().flatten().for_each(|v| *v *= s);
    kron_i3(&p)
}

fn add_each(blocks: &[ElementBlock], e: impl Fn(&ElementBlock) -> SymMatrix) -> Vec<SymMatrix> {
    blocks
        .iter()
        .map(|b| b.lumped_matrix().add(&e(b)))
        .collect()
}

pub fn olovsson_masses(
    blocks: &[ElementBlock],
    beta: f64,
    variant: OlovssonVariant,
) -> ElementScaling {
    ElementScaling {
        masses: add_each(blocks, |b| olovsson_block(b.element_mass, beta, variant)),
        ranks: Vec::new(),
    }
}

pub fn hoffmann_masses(blocks: &[ElementBlock], beta: f64) -> ElementScaling {
    ElementScaling {
        masses: add_each(blocks, |b| hoffmann_block(b.element_mass, beta)),
        ranks: Vec::new(),
    }
}

/// Multiplies the selected lumped entries of every element by `α`.
pub fn cms_masses(blocks: &[ElementBlock], local: &[usize], alpha: f64) -> ElementScaling {
    let masses = blocks
        .iter()
        .map(|b| {
            let mut d = b.lumped_mass.clone();
            for &i in local {
                d[i] *= alpha;
            }
            SymMatrix::from_diagonal(&d)
        })
        .collect();
    ElementScaling {
        masses,
        ranks: Vec::new(),
    }
}

/// Moves a cut between kept (`..cut`) and modified (`cut..`) ascending values
/// downward until it no longer separates a cluster.
fn widen_down(values: &[f64], mut cut: usize, tol: f64) -> usize {
    while cut > 0 && cut < values.len() && values[cut] - values[cut - 1] <= tol {
        cut -= 1;
    }
    cut
}

/// Moves the cut upward, for modifications of the smallest values.
fn widen_up(values: &[f64], mut cut: usize, tol: f64) -> usize {
    while cut > 0 && cut < values.len() && values[cut] - values[cut - 1] <= tol {
        cut += 1;
    }
    cut
}

fn scale_of(values: &[f64]) -> f64 {
    values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
}

/// `Mₑ + V diag(g) Vᵀ` with `V = Mₑ U`, written from the lower triangle so the
/// result is exactly symmetric.
fn add_deflation(m: &[f64], u: &DenseMatrix, cols: std::ops::Range<usize>, g: &[f64]) -> SymMatrix {
    let r = cols.len();
    let v = DenseMatrix::from_fn(m.len(), r, |i, k| m[i] * u[(i, cols.start + k)]);
    SymMatrix::from_diagonal(m).add_low_rank(&v, g)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LocalStrategy {
    /// `g = α` on the top `r` modes.
    S1 { alpha: f64 },
    /// `g(λ) = λ / λ_{m−r} − 1`.
    S2,
}

/// Local deflation of the top `r` eigenpairs of each `(Kₑ, Mₑ)`.
pub fn local_deflation_masses(
    blocks: &[ElementBlock],
    rank: usize,
    strategy: LocalStrategy,
) -> Result<ElementScaling, ScalingError> {
    if rank >= ELEMENT_DOFS {
        return Err(ScalingError::RankTooLarge {
            rank,
            limit: ELEMENT_DOFS,
        });
    }
    let mut masses = Vec::with_capacity(blocks.len());
    let mut ranks = Vec::with_capacity(blocks.len());
    for (e, b) in blocks.iter().enumerate() {
        if rank == 0 {
            masses.push(b.lumped_matrix());
            ranks.push(0);
            continue;
        }
        let eig = generalized_eig(&b.lumped_pair())
            .map_err(|source| ScalingError::DefectiveElementPair { element: e, source })?;
        let lam = &eig.values;
        let m = lam.len();
        let (cut, g): (usize, Vec<f64>) = match strategy {
            LocalStrategy::S1 { alpha } => {
                let cut = widen_down(lam, m - rank, CLUSTER_RTOL * scale_of(lam));
                (cut, vec![alpha; m - cut])
            }
            LocalStrategy::S2 => {
                let pivot = lam[m - rank - 1];
                // a rigid-body pivot (zero up to roundoff) would send g to infinity
                let zero = 64.0 * f64::EPSILON * scale_of(lam);
                if pivot <= zero {
                    let flexible = lam.iter().filter(|&&l| l > zero).count();
                    return Err(ScalingError::RankTooLarge {
                        rank,
                        limit: flexible,
                    });
                }
                (
                    m - rank,
                    lam[m - rank..].iter().map(|l| l / pivot - 1.0).collect(),
                )
            }
        };
        masses.push(add_deflation(&b.lumped_mass, &eig.vectors, cut..m, &g));
        ranks.push(m - cut);
    }
    Ok(ElementScaling { masses, ranks })
}

/// Adds `ε` to the `r` smallest eigenvalues of each lumped `Mₑ`.
pub fn stabilization_masses(
    blocks: &[ElementBlock],
    rank: usize,
    epsilon: f64,
) -> Result<ElementScaling, ScalingError> {
    if rank >= ELEMENT_DOFS {
        return Err(ScalingError::RankTooLarge {
            rank,
            limit: ELEMENT_DOFS,
        });
    }
    let mut masses = Vec::with_capacity(blocks.len());
    let mut ranks = Vec::with_capacity(blocks.len());
    for (e, b) in blocks.iter().enumerate() {
        let eig = sym_eig(&b.lumped_matrix())
            .map_err(|source| ScalingError::DefectiveElementPair { element: e, source })?;
        let cut = if rank == 0 {
            0
        } else {
            widen_up(&eig.values, rank, CLUSTER_RTOL * scale_of(&eig.values))
        };
        // standard problem: V = U₁ without an Mₑ factor
        let v = eig.vectors_range(0..cut);
        masses.push(b.lumped_matrix().add_low_rank(&v, &vec![epsilon; cut]));
        ranks.push(cut);
    }
    Ok(ElementScaling { masses, ranks })
}
