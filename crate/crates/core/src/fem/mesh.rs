//! Hexahedral meshes: structured generation and a plain text format.

use std::fmt::Write as _;

use super::{FemError, Hex8Geometry, NODES};

#[derive(Clone, Debug, PartialEq)]
pub struct Mesh {
    pub nodes: Vec<[f64; 3]>,
    pub elements: Vec<[usize; NODES]>,
}

impl Mesh {
    /// Validates connectivity.
    pub fn new(nodes: Vec<[f64; 3]>, elements: Vec<[usize; NODES]>) -> Result<Self, FemError> {
        for (e, conn) in elements.iter().enumerate() {
            if let Some(&index) = conn.iter().find(|&&i| i >= nodes.len()) {
                return Err(FemError::IndexOutOfRange {
                    element: e,
                    index,
                    bound: nodes.len(),
                });
            }
        }
        Ok(Self { nodes, elements })
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn element_count(&self) -> usize {
        self.elements.len()
    }

    pub fn dof_count(&self) -> usize {
        3 * self.nodes.len()
    }

    /// Global dof of component `c` at `node`.
    pub fn dof(&self, node: usize, c: usize) -> usize {
        c * self.nodes.len() + node
    }

    /// Number of elements touching each node.
    pub fn node_valence(&self) -> Vec<usize> {
        let mut p = vec![0; self.nodes.len()];
        for conn in &self.elements {
            for &i in conn {
                p[i] += 1;
            }
        }
        p
    }

    /// Maximum number of elements sharing a node.
    pub fn p_max(&self) -> usize {
        self.node_valence().into_iter().max().unwrap_or(0)
    }

    pub fn geometry(&self, e: usize) -> Hex8Geometry {
        let mut corners = [[0.0; 3]; NODES];
        for (c, &i) in corners.iter_mut().zip(&self.elements[e]) {
            *c = self.nodes[i];
        }
        Hex8Geometry::new(corners)
    }

    /// Component-blocked global dofs of element `e`.
    pub fn dof_map(&self, e: usize) -> [usize; 3 * NODES] {
        let mut map = [0; 3 * NODES];
        for c in 0..3 {
            for (a, &node) in self.elements[e].iter().enumerate() {
                map[c * NODES + a] = self.dof(node, c);
            }
        }
        map
    }

    /// One record per line: `node x y z` then `hex n0 … n7`.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for p in &self.nodes {
            writeln!(s, "node {:.17e} {:.17e} {:.17e}", p[0], p[1], p[2]).unwrap();
        }
        for conn in &self.elements {
            s.push_str("hex");
            for i in conn {
                write!(s, " {i}").unwrap();
            }
            s.push('\n');
        }
        s
    }

    /// Parses [`Mesh::to_text`] output; blank lines and `#` comments are skipped.
    pub fn from_text(text: &str) -> Result<Self, FemError> {
        let mut nodes = Vec::new();
        let mut elements = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let mut fields = body.split_whitespace();
            let kind = fields.next().unwrap();
            let rest: Vec<&str> = fields.collect();
            let err = |message: String| FemError::Parse { line, message };
            match kind {
                "node" => {
                    if rest.len() != 3 {
                        return Err(err(format!("node needs 3 coordinates, got {}", rest.len())));
                    }
                    let mut p = [0.0; 3];
                    for (d, f) in rest.iter().enumerate() {
                        p[d] = f
                            .parse()
                            .map_err(|e| err(format!("bad coordinate {f:?}: {e}")))?;
                    }
                    nodes.push(p);
                }
                "hex" => {
                    if rest.len() != NODES {
                        return Err(err(format!("hex needs 8 node indices, got {}", rest.len())));
                    }
                    let mut conn = [0; NODES];
                    for (a, f) in rest.iter().enumerate() {
                        conn[a] = f
                            .parse()
                            .map_err(|e| err(format!("bad index {f:?}: {e}")))?;
                    }
                    elements.push(conn);
                }
                other => return Err(err(format!("unknown record {other:?}"))),
            }
        }
        Self::new(nodes, elements)
    }
}

/// Uniform box mesh with `(nx, ny, nz)` nodes over `[0, Lx] × [0, Ly] × [0, Lz]`.
/// Nodes are numbered with z fastest, which keeps the nodal bandwidth small
/// for plate-like boxes.
pub fn build_structured_mesh(
    counts: (usize, usize, usize),
    extents: (f64, f64, f64),
) -> Result<Mesh, FemError> {
    let (nx, ny, nz) = counts;
    if nx < 2 || ny < 2 || nz < 2 {
        return Err(FemError::InvalidCounts { nx, ny, nz });
    }
    let (lx, ly, lz) = extents;
    if ![lx, ly, lz].iter().all(|v| *v > 0.0 && v.is_finite()) {
        return Err(FemError::InvalidExtents(lx, ly, lz));
    }
    let id = |i: usize, j: usize, k: usize| (i * ny + j) * nz + k;
    let mut nodes = Vec::with_capacity(nx * ny * nz);
    for i in 0..nx {
        for j in 0..ny {
            for k in 0..nz {
                nodes.push([
                    lx * i as f64 / (nx - 1) as f64,
                    ly * j as f64 / (ny - 1) as f64,
                    lz * k as f64 / (nz - 1) as f64,
                ]);
            }
        }
    }
    let mut elements = Vec::with_capacity((nx - 1) * (ny - 1) * (nz - 1));
    for i in 0..nx - 1 {
        for j in 0..ny - 1 {
            for k in 0..nz - 1 {
                elements.push([
                    id(i, j, k),
                    id(i + 1, j, k),
                    id(i + 1, j + 1, k),
                    id(i, j + 1, k),
                    id(i, j, k + 1),
                    id(i + 1, j, k + 1),
                    id(i + 1, j + 1, k + 1),
                    id(i, j + 1, k + 1),
                ]);
            }
        }
    }
    Mesh::new(nodes, elements)
}
