//! Stiffness and mass assembly for the Laplace eigenproblem.

pub mod sparse;

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

pub use sparse::SparseSym;

use crate::error::{Error, Result};
use crate::geom::Point;
use crate::mesh::Mesh;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoundaryCondition {
    Dirichlet,
    Neumann,
}

/// Generalized eigenproblem `K x = lambda M x` on the retained degrees of
/// freedom.
#[derive(Debug, Clone)]
pub struct OperatorPair {
    pub k: SparseSym,
    pub m: SparseSym,
    pub bc: BoundaryCondition,
}

impl OperatorPair {
    pub fn n_dof(&self) -> usize {
        self.k.n()
    }
}

/// Element stiffness for the linear triangle with vertices `p`.
pub fn p1_stiffness(p: [Point; 3]) -> [[f64; 3]; 3] {
    let area2 = (p[1].x - p[0].x) * (p[2].y - p[0].y) - (p[2].x - p[0].x) * (p[1].y - p[0].y);
    // Gradient of barycentric i is (-(y_k - y_j), x_k - x_j) / (2A), (i,j,k) cyclic.
    let g: [(f64, f64); 3] = std::array::from_fn(|i| {
        let (j, k) = ((i + 1) % 3, (i + 2) % 3);
        (p[j].y - p[k].y, p[k].x - p[j].x)
    });
    let mut ke = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            ke[i][j] = (g[i].0 * g[j].0 + g[i].1 * g[j].1) / (2.0 * area2);
        }
    }
    ke
}

/// Consistent mass matrix of the linear triangle.
pub fn p1_mass(p: [Point; 3]) -> [[f64; 3]; 3] {
    let area = 0.5 * ((p[1].x - p[0].x) * (p[2].y - p[0].y) - (p[2].x - p[0].x) * (p[1].y - p[0].y));
    let mut me = [[area / 12.0; 3]; 3];
    for (i, row) in me.iter_mut().enumerate() {
        row[i] = area / 6.0;
    }
    me
}

/// Quadratic triangle: local dofs are the vertices then the midpoints of
/// edges (1,2), (2,0), (0,1).
pub fn p2_element(p: [Point; 3]) -> ([[f64; 6]; 6], [[f64; 6]; 6]) {
    let area2 = (p[1].x - p[0].x) * (p[2].y - p[0].y) - (p[2].x - p[0].x) * (p[1].y - p[0].y);
    let area = 0.5 * area2;
    let g: [(f64, f64); 3] = std::array::from_fn(|i| {
        let (j, k) = ((i + 1) % 3, (i + 2) % 3);
        ((p[j].y - p[k].y) / area2, (p[k].x - p[j].x) / area2)
    });
    let dot = |a: usize, b: usize| g[a].0 * g[b].0 + g[a].1 * g[b].1;

    // Exact integrals of barycentric monomials:
    // int l_a l_b = A (1 + [a == b]) / 12.
    let ll = |a: usize, b: usize| area * if a == b { 2.0 } else { 1.0 } / 12.0;

    // Basis gradients as linear combinations sum_c coef * l_c * grad l_d.
    // Vertex i: (4 l_i - 1) grad l_i; edge (i,j): 4 (l_i grad l_j + l_j grad l_i).
    // Represent grad phi = sum over (c, d) of w * l_c * grad l_d plus constant
    // terms w0 * grad l_d.
    type Terms = Vec<(Option<usize>, usize, f64)>;
    let edges = [(1usize, 2usize), (2, 0), (0, 1)];
    let grads: Vec<Terms> = (0..6)
        .map(|a| {
            if a < 3 {
                vec![(Some(a), a, 4.0), (None, a, -1.0)]
            } else {
                let (i, j) = edges[a - 3];
                vec![(Some(i), j, 4.0), (Some(j), i, 4.0)]
            }
        })
        .collect();
    let int_l = area / 3.0;
    let mut ke = [[0.0; 6]; 6];
    for a in 0..6 {
        for b in 0..6 {
            let mut s = 0.0;
            for &(ca, da, wa) in &grads[a] {
                for &(cb, db, wb) in &grads[b] {
                    let integral = match (ca, cb) {
                        (Some(x), Some(y)) => ll(x, y),
                        (Some(_), None) | (None, Some(_)) => int_l,
                        (None, None) => area,
                    };
                    s += wa * wb * dot(da, db) * integral;
                }
            }
            ke[a][b] = s;
        }
    }

    // Mass via the exact formula int l1^a l2^b l3^c = 2A a! b! c! / (a+b+c+2)!.
    // Basis in monomial form: vertex i = 2 l_i^2 - l_i (l_1+l_2+l_3),
    // edge (i,j) = 4 l_i l_j.
    let fact = [1.0, 1.0, 2.0, 6.0, 24.0, 120.0, 720.0];
    let mono = |e: [usize; 3]| 2.0 * area * fact[e[0]] * fact[e[1]] * fact[e[2]] / fact[e[0] + e[1] + e[2] + 2];
    let basis: Vec<Vec<([usize; 3], f64)>> = (0..6)
        .map(|a| {
            let unit = |i: usize| {
                let mut e = [0; 3];
                e[i] = 1;
                e
            };
            let add = |x: [usize; 3], y: [usize; 3]| [x[0] + y[0], x[1] + y[1], x[2] + y[2]];
            if a < 3 {
                let mut v = vec![(add(unit(a), unit(a)), 2.0)];
                for c in 0..3 {
                    v.push((add(unit(a), unit(c)), -1.0));
                }
                v
            } else {
                let (i, j) = edges[a - 3];
                vec![(add(unit(i), unit(j)), 4.0)]
            }
        })
        .collect();
    let mut me = [[0.0; 6]; 6];
    for a in 0..6 {
        for b in 0..6 {
            let mut s = 0.0;
            for &(ea, wa) in &basis[a] {
                for &(eb, wb) in &basis[b] {
                    s += wa * wb * mono([ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2]]);
                }
            }
            me[a][b] = s;
        }
    }
    (ke, me)
}

/// Assembles the pair for the given boundary condition and degree (1 or 2).
pub fn assemble(mesh: &Mesh, bc: BoundaryCondition, degree: u8) -> Result<OperatorPair> {
    if mesh.triangle_count() == 0 {
        return Err(Error::EmptyMesh);
    }
    let nodes = mesh.nodes();
    let (n_all, boundary, k_trip, m_trip) = match degree {
        1 => {
            let mut kt = Vec::with_capacity(9 * mesh.triangle_count());
            let mut mt = Vec::with_capacity(9 * mesh.triangle_count());
            for tri in mesh.triangles() {
                let p = tri.map(|v| nodes[v]);
                let (ke, me) = (p1_stiffness(p), p1_mass(p));
                for a in 0..3 {
                    for b in 0..3 {
                        kt.push((tri[a], tri[b], ke[a][b]));
                        mt.push((tri[a], tri[b], me[a][b]));
                    }
                }
            }
            (nodes.len(), mesh.boundary_flags().to_vec(), kt, mt)
        }
        2 => {
            let edges = mesh.edges();
            let edge_dof: HashMap<(usize, usize), usize> = edges
                .iter()
                .enumerate()
                .map(|(e, &(key, _))| (key, nodes.len() + e))
                .collect();
            let mut boundary = mesh.boundary_flags().to_vec();
            boundary.extend(edges.iter().map(|&(_, uses)| uses == 1));
            let mut kt = Vec::with_capacity(36 * mesh.triangle_count());
            let mut mt = Vec::with_capacity(36 * mesh.triangle_count());
            for tri in mesh.triangles() {
                let p = tri.map(|v| nodes[v]);
                let (ke, me) = p2_element(p);
                let e = |i: usize, j: usize| edge_dof[&(tri[i].min(tri[j]), tri[i].max(tri[j]))];
                let dofs = [tri[0], tri[1], tri[2], e(1, 2), e(2, 0), e(0, 1)];
                for a in 0..6 {
                    for b in 0..6 {
                        kt.push((dofs[a], dofs[b], ke[a][b]));
                        mt.push((dofs[a], dofs[b], me[a][b]));
                    }
                }
            }
            (nodes.len() + edges.len(), boundary, kt, mt)
        }
        d => return Err(Error::Parameter(format!("element degree must be 1 or 2, got {d}"))),
    };
    let k = SparseSym::from_triplets(n_all, k_trip);
    let m = SparseSym::from_triplets(n_all, m_trip);
    Ok(match bc {
        BoundaryCondition::Neumann => OperatorPair { k, m, bc },
        BoundaryCondition::Dirichlet => {
            let keep: Vec<usize> = (0..n_all).filter(|&i| !boundary[i]).collect();
            if keep.is_empty() {
                return Err(Error::EmptyMesh);
            }
            OperatorPair {
                k: k.submatrix(&keep),
                m: m.submatrix(&keep),
                bc,
            }
        }
    })
}
