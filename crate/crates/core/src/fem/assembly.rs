//! Element blocks and the scatter `A = Σₑ Lₑᵀ Aₑ Lₑ`.

use std::sync::Arc;

use super::{
    element_mass, hex8_consistent_mass, hex8_stiffness, lump_row_sum, FemError, Hex8Geometry,
    Material, Mesh, ELEMENT_DOFS,
};
use crate::linalg::{LinalgError, MatrixPair, SymMatrix};

/// Per-element matrices and their global dof map.
#[derive(Clone, Debug)]
pub struct ElementBlock {
    pub stiffness: SymMatrix,
    pub mass: SymMatrix,
    /// Diagonal of the row-sum lumped mass.
    pub lumped_mass: Vec<f64>,
    /// `mₑ = ∫ρ dV`.
    pub element_mass: f64,
    pub dof_map: [usize; ELEMENT_DOFS],
    pub geometry: Hex8Geometry,
}

impl ElementBlock {
    pub fn lumped_matrix(&self) -> SymMatrix {
        SymMatrix::from_diagonal(&self.lumped_mass)
    }

    /// The pair `(Kₑ, Mₑ)` with lumped mass.
    pub fn lumped_pair(&self) -> MatrixPair {
        MatrixPair::new(self.stiffness.clone(), self.lumped_matrix()).expect("orders match")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BlockMatrix {
    Stiffness,
    Lumped,
    Consistent,
}

/// Builds blocks for every element, with `material(e)` giving element `e`'s material.
pub fn element_blocks(
    mesh: &Mesh,
    material: impl Fn(usize) -> Material,
) -> Result<Vec<ElementBlock>, FemError> {
    (0..mesh.element_count())
        .map(|e| {
            let g = mesh.geometry(e);
            let mat = material(e);
            let mass = hex8_consistent_mass(&g, &mat)?;
            Ok(ElementBlock {
                stiffness: hex8_stiffness(&g, &mat)?,
                lumped_mass: lump_row_sum(&mass)?,
                mass,
                element_mass: element_mass(&g, &mat)?,
                dof_map: mesh.dof_map(e),
                geometry: g,
            })
        })
        .collect()
}

/// Sums mapped element matrices into an `n × n` global matrix, in element order.
pub fn assemble_local<'a>(
    n: usize,
    parts: impl IntoIterator<Item = (&'a [usize], &'a SymMatrix)>,
) -> Result<SymMatrix, FemError> {
    let mut out = SymMatrix::zeros(n);
    for (e, (map, block)) in parts.into_iter().enumerate() {
        if map.len() != block.order() {
            return Err(FemError::DimensionMismatch {
                expected: block.order(),
                actual: map.len(),
            });
        }
        if let Some(&index) = map.iter().find(|&&i| i >= n) {
            return Err(FemError::IndexOutOfRange {
                element: e,
                index,
                bound: n,
            });
        }
        out.add_block(map, block);
    }
    Ok(out)
}

/// Assembles one kind of block matrix.
pub fn assemble(
    n: usize,
    blocks: &[ElementBlock],
    which: BlockMatrix,
) -> Result<SymMatrix, FemError> {
    match which {
        BlockMatrix::Stiffness => {
            assemble_local(n, blocks.iter().map(|b| (&b.dof_map[..], &b.stiffness)))
        }
        BlockMatrix::Consistent => {
            assemble_local(n, blocks.iter().map(|b| (&b.dof_map[..], &b.mass)))
        }
        BlockMatrix::Lumped => Ok(SymMatrix::from_diagonal(&assemble_diagonal(
            n,
            blocks,
            |b| &b.lumped_mass,
        )?)),
    }
}

/// Assembles per-element diagonals into a global diagonal.
pub fn assemble_diagonal(
    n: usize,
    blocks: &[ElementBlock],
    diag: impl Fn(&ElementBlock) -> &[f64],
) -> Result<Vec<f64>, FemError> {
    let mut out = vec![0.0; n];
    for (e, b) in blocks.iter().enumerate() {
        for (&g, &v) in b.dof_map.iter().zip(diag(b)) {
            if g >= n {
                return Err(FemError::IndexOutOfRange {
                    element: e,
                    index: g,
                    bound: n,
                });
            }
            out[g] += v;
        }
    }
    Ok(out)
}

/// Complement of a Dirichlet mask.
pub fn free_dofs(n: usize, constrained: &[usize]) -> Vec<usize> {
    let mut fixed = vec![false; n];
    for &i in constrained {
        if i < n {
            fixed[i] = true;
        }
    }
    (0..n).filter(|&i| !fixed[i]).collect()
}

/// Assembled free-free model with lumped mass.
#[derive(Clone, Debug)]
pub struct FeModel {
    pub mesh: Mesh,
    pub blocks: Vec<ElementBlock>,
    /// Shared so scaled systems that keep `K` can hold the same matrix.
    pub stiffness: Arc<SymMatrix>,
    pub lumped_mass: Vec<f64>,
}

impl FeModel {
    pub fn new(mesh: Mesh, material: impl Fn(usize) -> Material) -> Result<Self, FemError> {
        let blocks = element_blocks(&mesh, material)?;
        let n = mesh.dof_count();
        let stiffness = Arc::new(assemble(n, &blocks, BlockMatrix::Stiffness)?);
        let lumped_mass = assemble_diagonal(n, &blocks, |b| &b.lumped_mass)?;
        Ok(Self {
            mesh,
            blocks,
            stiffness,
            lumped_mass,
        })
    }

    pub fn uniform(mesh: Mesh, material: Material) -> Result<Self, FemError> {
        Self::new(mesh, |_| material)
    }

    pub fn dof_count(&self) -> usize {
        self.mesh.dof_count()
    }

    pub fn mass_matrix(&self) -> SymMatrix {
        SymMatrix::from_diagonal(&self.lumped_mass)
    }

    pub fn pair(&self) -> MatrixPair {
        MatrixPair::new(SymMatrix::clone(&self.stiffness), self.mass_matrix())
            .expect("orders match")
    }

    /// Restriction of `(K, M)` to the free dofs of a Dirichlet mask.
    pub fn constrained_pair(&self, constrained: &[usize]) -> Result<MatrixPair, LinalgError> {
        let free = free_dofs(self.dof_count(), constrained);
        MatrixPair::new(
            self.stiffness.submatrix(&free),
            self.mass_matrix().submatrix(&free),
        )
    }
}
