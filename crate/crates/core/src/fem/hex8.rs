//! Isoparametric trilinear hexahedron with full 2×2×2 Gauss quadrature.

use super::{FemError, Material, ELEMENT_DOFS, NODES};
use crate::linalg::SymMatrix;

/// Natural coordinates of the nodes: bottom face (ζ = −1) counterclockwise,
/// then the top face in the same order.
pub const NODE_NATURAL: [[f64; 3]; NODES] = [
    [-1.0, -1.0, -1.0],
    [1.0, -1.0, -1.0],
    [1.0, 1.0, -1.0],
    [-1.0, 1.0, -1.0],
    [-1.0, -1.0, 1.0],
    [1.0, -1.0, 1.0],
    [1.0, 1.0, 1.0],
    [-1.0, 1.0, 1.0],
];

/// Corner coordinates in metres, ordered like [`NODE_NATURAL`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Hex8Geometry {
    pub corners: [[f64; 3]; NODES],
}

impl Hex8Geometry {
    pub fn new(corners: [[f64; 3]; NODES]) -> Self {
        Self { corners }
    }

    /// Axis-aligned box with its minimum corner at `origin`.
    pub fn brick(origin: [f64; 3], extents: [f64; 3]) -> Self {
        let mut corners = [[0.0; 3]; NODES];
        for (c, nat) in corners.iter_mut().zip(NODE_NATURAL) {
            for d in 0..3 {
                c[d] = origin[d] + 0.5 * (nat[d] + 1.0) * extents[d];
            }
        }
        Self { corners }
    }

    pub fn centroid(&self) -> [f64; 3] {
        let mut c = [0.0; 3];
        for p in &self.corners {
            for d in 0..3 {
                c[d] += p[d] / NODES as f64;
            }
        }
        c
    }

    /// Volume by quadrature of the Jacobian determinant.
    pub fn volume(&self) -> Result<f64, FemError> {
        Ok(quadrature(self)?.iter().map(|q| q.det * q.weight).sum())
    }
}

/// Shape function values and natural derivatives at a natural point.
fn shape(xi: [f64; 3]) -> ([f64; NODES], [[f64; 3]; NODES]) {
    let mut n = [0.0; NODES];
    let mut dn = [[0.0; 3]; NODES];
    for (a, nat) in NODE_NATURAL.iter().enumerate() {
        let f = [
            1.0 + nat[0] * xi[0],
            1.0 + nat[1] * xi[1],
            1.0 + nat[2] * xi[2],
        ];
        n[a] = 0.125 * f[0] * f[1] * f[2];
        dn[a] = [
            0.125 * nat[0] * f[1] * f[2],
            0.125 * f[0] * nat[1] * f[2],
            0.125 * f[0] * f[1] * nat[2],
        ];
    }
    (n, dn)
}

pub(crate) struct QuadPoint {
    pub n: [f64; NODES],
    /// Physical gradients `∂N_a/∂x_d`.
    pub grad: [[f64; 3]; NODES],
    pub det: f64,
    pub weight: f64,
}

pub(crate) fn quadrature(g: &Hex8Geometry) -> Result<Vec<QuadPoint>, FemError> {
    let p = 1.0 / 3f64.sqrt();
    let mut out = Vec::with_capacity(8);
    for (idx, nat) in NODE_NATURAL.iter().enumerate() {
        let xi = [p * nat[0], p * nat[1], p * nat[2]];
        let (n, dn) = shape(xi);
        // J[i][j] = ∂x_j/∂ξ_i
        let mut j = [[0.0; 3]; 3];
        for a in 0..NODES {
            for r in 0..3 {
                for c in 0..3 {
                    j[r][c] += dn[a][r] * g.corners[a][c];
                }
            }
        }
        let det = j[0][0] * (j[1][1] * j[2][2] - j[1][2] * j[2][1])
            - j[0][1] * (j[1][0] * j[2][2] - j[1][2] * j[2][0])
            + j[0][2] * (j[1][0] * j[2][1] - j[1][1] * j[2][0]);
        if !(det > 0.0) {
            return Err(FemError::DegenerateJacobian { point: idx, det });
        }
        let inv = [
            [
                (j[1][1] * j[2][2] - j[1][2] * j[2][1]) / det,
                (j[0][2] * j[2][1] - j[0][1] * j[2][2]) / det,
                (j[0][1] * j[1][2] - j[0][2] * j[1][1]) / det,
            ],
            [
                (j[1][2] * j[2][0] - j[1][0] * j[2][2]) / det,
                (j[0][0] * j[2][2] - j[0][2] * j[2][0]) / det,
                (j[0][2] * j[1][0] - j[0][0] * j[1][2]) / det,
            ],
            [
                (j[1][0] * j[2][1] - j[1][1] * j[2][0]) / det,
                (j[0][1] * j[2][0] - j[0][0] * j[2][1]) / det,
                (j[0][0] * j[1][1] - j[0][1] * j[1][0]) / det,
            ],
        ];
        // ∂N/∂x_d = Σ_i (J⁻¹)[d][i] ∂N/∂ξ_i
        let mut grad = [[0.0; 3]; NODES];
        for a in 0..NODES {
            for d in 0..3 {
                grad[a][d] = (0..3).map(|i| inv[d][i] * dn[a][i]).sum();
            }
        }
        out.push(QuadPoint {
            n,
            grad,
            det,
            weight: 1.0,
        });
    }
    Ok(out)
}

/// Element stiffness, 24×24, component-blocked.
///
/// `K[(c,a),(d,b)] = ∫ λ ∂_c N_a ∂_d N_b + μ ∂_d N_a ∂_c N_b + μ δ_cd ∇N_a·∇N_b`.
pub fn hex8_stiffness(g: &Hex8Geometry, mat: &Material) -> Result<SymMatrix, FemError> {
    let (lambda, mu) = mat.lame();
    let mut k = vec![0.0; ELEMENT_DOFS * ELEMENT_DOFS];
    for q in quadrature(g)? {
        let w = q.det * q.weight;
        for c in 0..3 {
            for a in 0..NODES {
                let row = (c * NODES + a) * ELEMENT_DOFS;
                for d in 0..3 {
                    for b in 0..NODES {
                        let ga = q.grad[a];
                        let gb = q.grad[b];
                        let mut v = lambda * ga[c] * gb[d] + mu * ga[d] * gb[c];
                        if c == d {
                            v += mu * (ga[0] * gb[0] + ga[1] * gb[1] + ga[2] * gb[2]);
                        }
                        k[row + d * NODES + b] += w * v;
                    }
                }
            }
        }
    }
    Ok(SymMatrix::from_square_buffer_symmetrized(ELEMENT_DOFS, k))
}

/// Consistent mass `I₃ ⊗ ∫ρ N Nᵀ`, exact for parallelepipeds.
pub fn hex8_consistent_mass(g: &Hex8Geometry, mat: &Material) -> Result<SymMatrix, FemError> {
    let mut nodal = [[0.0; NODES]; NODES];
    for q in quadrature(g)? {
        let w = mat.density * q.det * q.weight;
        for a in 0..NODES {
            for b in 0..NODES {
                nodal[a][b] += w * q.n[a] * q.n[b];
            }
        }
    }
    Ok(SymMatrix::from_lower_fn(ELEMENT_DOFS, |i, j| {
        if i / NODES == j / NODES {
            nodal[i % NODES][j % NODES]
        } else {
            0.0
        }
    }))
}

/// Element mass `mₑ = ∫ρ dV`.
pub fn element_mass(g: &Hex8Geometry, mat: &Material) -> Result<f64, FemError> {
    Ok(mat.density * g.volume()?)
}

/// Three translations and three infinitesimal rotations about the centroid,
/// as component-blocked 24-vectors.
pub fn rigid_body_modes(g: &Hex8Geometry) -> Vec<Vec<f64>> {
    let c = g.centroid();
    let mut modes = Vec::with_capacity(6);
    for d in 0..3 {
        let mut v = vec![0.0; ELEMENT_DOFS];
        v[d * NODES..(d + 1) * NODES].fill(1.0);
        modes.push(v);
    }
    for axis in 0..3 {
        let mut v = vec![0.0; ELEMENT_DOFS];
        for (a, p) in g.corners.iter().enumerate() {
            let r = [p[0] - c[0], p[1] - c[1], p[2] - c[2]];
            let mut w = [0.0; 3];
            w[axis] = 1.0;
            let u = [
                w[1] * r[2] - w[2] * r[1],
                w[2] * r[0] - w[0] * r[2],
                w[0] * r[1] - w[1] * r[0],
            ];
            for d in 0..3 {
                v[d * NODES + a] = u[d];
            }
        }
        modes.push(v);
    }
    modes
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{norm2, sym_eigvals};

    #[test]
    fn brick_volume_and_mass() {
        let g = Hex8Geometry::brick([0.0; 3], [1.0, 1.0, 1e-3]);
        assert!((g.volume().unwrap() - 1e-3).abs() < 1e-18);
        let m = element_mass(&g, &Material::steel()).unwrap();
        assert!((m - 7.8).abs() < 1e-12);
    }

    #[test]
    fn inverted_element_is_rejected() {
        let mut g = Hex8Geometry::brick([0.0; 3], [1.0; 3]);
        g.corners.swap(0, 4);
        g.corners.swap(1, 5);
        g.corners.swap(2, 6);
        g.corners.swap(3, 7);
        assert!(matches!(
            hex8_stiffness(&g, &Material::steel()),
            Err(FemError::DegenerateJacobian { .. })
        ));
    }

    #[test]
    fn rigid_modes_in_kernel() {
        let g = Hex8Geometry::new([
            [0.0, 0.0, 0.0],
            [1.2, 0.1, 0.0],
            [1.1, 0.9, 0.1],
            [-0.1, 1.0, 0.0],
            [0.0, 0.1, 0.8],
            [1.0, 0.0, 1.0],
            [1.2, 1.1, 0.9],
            [0.1, 1.0, 1.1],
        ]);
        let k = hex8_stiffness(&g, &Material::steel()).unwrap();
        let scale = k.frobenius_norm();
        for (i, v) in rigid_body_modes(&g).iter().enumerate() {
            let r = norm2(&k.mul_vec(v)) / (scale * norm2(v));
            let tol = if i < 3 { 1e-12 } else { 1e-9 };
            assert!(r < tol, "mode {i}: {r:e}");
        }
    }

    #[test]
    fn unit_cube_zero_poisson_has_equal_diagonal() {
        let g = Hex8Geometry::brick([0.0; 3], [1.0; 3]);
        let k = hex8_stiffness(&g, &Material::new(1.0, 0.0, 1.0).unwrap()).unwrap();
        let d = k.diagonal();
        for v in &d {
            assert!((v - d[0]).abs() <= 1e-14 * d[0]);
        }
    }

    #[test]
    fn unit_cube_has_six_zero_modes() {
        let g = Hex8Geometry::brick([0.0; 3], [1.0; 3]);
        let ev = sym_eigvals(&hex8_stiffness(&g, &Material::steel()).unwrap()).unwrap();
        let top = ev[23];
        assert!(ev[..6].iter().all(|v| v.abs() < 1e-10 * top));
        assert!(ev[6..].iter().all(|&v| v > 1e-6 * top));
    }

    #[test]
    fn consistent_mass_per_direction_sums_to_element_mass() {
        let g = Hex8Geometry::brick([0.5, 0.0, 0.0], [0.2, 0.3, 0.4]);
        let mat = Material::steel();
        let m = hex8_consistent_mass(&g, &mat).unwrap();
        let me = element_mass(&g, &mat).unwrap();
        for c in 0..3 {
            let s: f64 = (0..NODES)
                .flat_map(|a| (0..NODES).map(move |b| (a, b)))
                .map(|(a, b)| m[(c * 8 + a, c * 8 + b)])
                .sum();
            assert!((s - me).abs() <= 1e-12 * me);
        }
    }
}
