//! Conforming triangle meshes of planar domains and uniform refinement.

mod triangulate;

use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geom::predicates::orient;
use crate::geom::{PlanarDomain, Point};

/// Default cap on the number of mesh nodes.
pub const DEFAULT_NODE_CAP: usize = 2_000_000;

/// Coarse Steiner spacing never drops below `diameter / COARSE_RESOLUTION`;
/// finer targets are reached by uniform refinement.
const COARSE_RESOLUTION: f64 = 64.0;

#[derive(Debug, Clone)]
pub struct Mesh {
    nodes: Vec<Point>,
    triangles: Vec<[usize; 3]>,
    on_boundary: Vec<bool>,
    holes: usize,
    h: f64,
}

#[derive(Serialize)]
struct MeshDump<'a> {
    nodes: &'a [Point],
    triangles: &'a [[usize; 3]],
    boundary_nodes: Vec<usize>,
}

impl Mesh {
    pub fn nodes(&self) -> &[Point] {
        &self.nodes
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn is_boundary(&self, node: usize) -> bool {
        self.on_boundary[node]
    }

    /// Sorted indices of nodes on the domain boundary.
    pub fn boundary_nodes(&self) -> Vec<usize> {
        (0..self.nodes.len()).filter(|&i| self.on_boundary[i]).collect()
    }

    pub fn boundary_flags(&self) -> &[bool] {
        &self.on_boundary
    }

    /// Maximum edge length.
    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn hole_count(&self) -> usize {
        self.holes
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn triangle_count(&self) -> usize {
        self.triangles.len()
    }

    pub fn triangle_area(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangles[t];
        0.5 * orient(self.nodes[a], self.nodes[b], self.nodes[c])
    }

    pub fn area(&self) -> f64 {
        (0..self.triangles.len()).map(|t| self.triangle_area(t)).sum()
    }

    /// Undirected edges with the number of triangles using each, sorted.
    pub fn edges(&self) -> Vec<((usize, usize), usize)> {
        let mut count: HashMap<(usize, usize), usize> = HashMap::new();
        for tri in &self.triangles {
            for k in 0..3 {
                let (a, b) = (tri[k], tri[(k + 1) % 3]);
                *count.entry((a.min(b), a.max(b))).or_default() += 1;
            }
        }
        let mut v: Vec<_> = count.into_iter().collect();
        v.sort_unstable();
        v
    }

    /// Smallest interior angle over all triangles, in degrees.
    pub fn min_angle_degrees(&self) -> f64 {
        let mut min = f64::INFINITY;
        for &[a, b, c] in &self.triangles {
            let p = [self.nodes[a], self.nodes[b], self.nodes[c]];
            for k in 0..3 {
                let (o, u, v) = (p[k], p[(k + 1) % 3], p[(k + 2) % 3]);
                let (ux, uy, vx, vy) = (u.x - o.x, u.y - o.y, v.x - o.x, v.y - o.y);
                let ang = (ux * vy - uy * vx).abs().atan2(ux * vx + uy * vy);
                min = min.min(ang.to_degrees());
            }
        }
        min
    }

    /// V - E + F for the triangles as faces.
    pub fn euler_characteristic(&self) -> i64 {
        self.nodes.len() as i64 - self.edges().len() as i64 + self.triangles.len() as i64
    }

    /// Checks every structural invariant; returns a description of the first
    /// violation.
    pub fn validate(&self) -> std::result::Result<(), String> {
        if self.triangles.is_empty() {
            return Err("no triangles".into());
        }
        let mut used = vec![false; self.nodes.len()];
        for (t, tri) in self.triangles.iter().enumerate() {
            if tri.iter().any(|&v| v >= self.nodes.len()) {
                return Err(format!("triangle {t} references a missing node"));
            }
            if self.triangle_area(t) <= 0.0 {
                return Err(format!("triangle {t} is not positively oriented"));
            }
            tri.iter().for_each(|&v| used[v] = true);
        }
        if let Some(v) = used.iter().position(|&u| !u) {
            return Err(format!("node {v} belongs to no triangle"));
        }
        let mut directed: HashMap<(usize, usize), usize> = HashMap::new();
        for tri in &self.triangles {
            for k in 0..3 {
                *directed.entry((tri[k], tri[(k + 1) % 3])).or_default() += 1;
            }
        }
        for (&(a, b), &n) in &directed {
            if n > 1 {
                return Err(format!("directed edge {a}->{b} used {n} times"));
            }
            if !directed.contains_key(&(b, a)) && !(self.on_boundary[a] && self.on_boundary[b]) {
                return Err(format!("free edge {a}-{b} has an interior endpoint"));
            }
        }
        let expected = 1 - self.holes as i64;
        let chi = self.euler_characteristic();
        if chi != expected {
            return Err(format!("Euler characteristic {chi}, expected {expected}"));
        }
        Ok(())
    }

    /// Splits every triangle into four at its edge midpoints.
    pub fn refine(&self) -> Mesh {
        let edge_use: HashMap<(usize, usize), usize> = self.edges().into_iter().collect();
        let mut nodes = self.nodes.clone();
        let mut on_boundary = self.on_boundary.clone();
        let mut mid: HashMap<(usize, usize), usize> = HashMap::with_capacity(edge_use.len());
        let mut triangles = Vec::with_capacity(4 * self.triangles.len());
        for &[a, b, c] in &self.triangles {
            let mut midpoint = |u: usize, v: usize| {
                let key = (u.min(v), u.max(v));
                *mid.entry(key).or_insert_with(|| {
                    nodes.push(nodes[u].midpoint(nodes[v]));
                    on_boundary.push(edge_use[&key] == 1);
                    nodes.len() - 1
                })
            };
            let (ab, bc, ca) = (midpoint(a, b), midpoint(b, c), midpoint(c, a));
            triangles.push([a, ab, ca]);
            triangles.push([ab, b, bc]);
            triangles.push([ca, bc, c]);
            triangles.push([ab, bc, ca]);
        }
        Mesh::from_parts(nodes, triangles, on_boundary, self.holes)
    }

    fn from_parts(
        nodes: Vec<Point>,
        triangles: Vec<[usize; 3]>,
        on_boundary: Vec<bool>,
        holes: usize,
    ) -> Mesh {
        let h = triangles
            .iter()
            .flat_map(|&[a, b, c]| [(a, b), (b, c), (c, a)])
            .map(|(u, v)| nodes[u].dist(nodes[v]))
            .fold(0.0, f64::max);
        Mesh {
            nodes,
            triangles,
            on_boundary,
            holes,
            h,
        }
    }

    /// JSON `{nodes, triangles, boundary_nodes}`.
    pub fn to_json(&self) -> String {
        serde_json::to_string(&MeshDump {
            nodes: &self.nodes,
            triangles: &self.triangles,
            boundary_nodes: self.boundary_nodes(),
        })
        .expect("mesh serializes")
    }
}

/// Triangulates `domain` with maximum edge length at most `h_target`.
pub fn triangulate(domain: &PlanarDomain, h_target: f64) -> Result<Mesh> {
    triangulate_with_cap(domain, h_target, DEFAULT_NODE_CAP)
}

pub fn triangulate_with_cap(domain: &PlanarDomain, h_target: f64, node_cap: usize) -> Result<Mesh> {
    if !(h_target > 0.0 && h_target.is_finite()) {
        return Err(Error::Parameter(format!("h_target must be positive, got {h_target}")));
    }
    // A lattice cell of side s has diagonal s*sqrt(2).
    let spacing = (h_target / std::f64::consts::SQRT_2).max(domain.diameter() / COARSE_RESOLUTION);
    let coarse = triangulate::coarse_triangulation(domain, spacing)?;
    let mut mesh = Mesh::from_parts(
        coarse.nodes,
        coarse.triangles,
        coarse.boundary,
        domain.holes().len(),
    );
    while mesh.h > h_target {
        check_cap(&mesh, node_cap)?;
        mesh = mesh.refine();
    }
    if mesh.node_count() > node_cap {
        return Err(cap_error(mesh.node_count(), node_cap));
    }
    Ok(mesh)
}

/// Refines once, refusing if the result would exceed `node_cap` nodes.
pub fn refine_with_cap(mesh: &Mesh, node_cap: usize) -> Result<Mesh> {
    check_cap(mesh, node_cap)?;
    Ok(mesh.refine())
}

fn check_cap(mesh: &Mesh, node_cap: usize) -> Result<()> {
    // After one refinement V' = V + E.
    let next = mesh.node_count() + mesh.edges().len();
    if next > node_cap {
        return Err(cap_error(next, node_cap));
    }
    Ok(())
}

fn cap_error(nodes: usize, cap: usize) -> Error {
    Error::Resource(format!("mesh would have {nodes} nodes, cap is {cap}"))
}
