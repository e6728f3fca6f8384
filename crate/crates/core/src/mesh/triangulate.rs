//! Constrained Delaunay triangulation of a polygon with holes.
//!
//! Holes are joined to the outer loop by bridge cuts so the boundary becomes a
//! single weakly simple ring whose repeated vertices share node indices. The
//! ring is ear-clipped, boundary edges are split and interior Steiner points
//! inserted, and Lawson flips restore the constrained Delaunay property.

use std::collections::{HashMap, HashSet};

use crate::error::{Error, Result};
use crate::geom::predicates::{incircle, orient, point_in_loop, segments_intersect};
use crate::geom::{PlanarDomain, Point};

/// Output of [`coarse_triangulation`]: nodes, CCW triangles, boundary flags.
pub(crate) struct Coarse {
    pub nodes: Vec<Point>,
    pub triangles: Vec<[usize; 3]>,
    pub boundary: Vec<bool>,
}

type Edge = (usize, usize);

fn undirected(a: usize, b: usize) -> Edge {
    (a.min(b), a.max(b))
}

/// Triangulation under construction, indexed by directed edges.
struct Cdt {
    pts: Vec<Point>,
    tris: Vec<[usize; 3]>,
    owner: HashMap<Edge, usize>,
    constrained: HashSet<Edge>,
}

impl Cdt {
    fn new(pts: Vec<Point>, tris: Vec<[usize; 3]>, constrained: HashSet<Edge>) -> Self {
        let mut owner = HashMap::with_capacity(tris.len() * 3);
        for (t, tri) in tris.iter().enumerate() {
            for k in 0..3 {
                owner.insert((tri[k], tri[(k + 1) % 3]), t);
            }
        }
        Self {
            pts,
            tris,
            owner,
            constrained,
        }
    }

    fn set(&mut self, t: usize, tri: [usize; 3]) {
        let old = self.tris[t];
        for k in 0..3 {
            let e = (old[k], old[(k + 1) % 3]);
            if self.owner.get(&e) == Some(&t) {
                self.owner.remove(&e);
            }
        }
        self.tris[t] = tri;
        for k in 0..3 {
            self.owner.insert((tri[k], tri[(k + 1) % 3]), t);
        }
    }

    fn push(&mut self, tri: [usize; 3]) -> usize {
        let t = self.tris.len();
        self.tris.push(tri);
        for k in 0..3 {
            self.owner.insert((tri[k], tri[(k + 1) % 3]), t);
        }
        t
    }

    fn third(&self, t: usize, a: usize, b: usize) -> usize {
        let tri = self.tris[t];
        *tri.iter().find(|&&v| v != a && v != b).expect("triangle has three vertices")
    }

    /// Triangle containing `p` (closed), by walking from `hint` with a
    /// brute-force fallback.
    fn locate(&self, p: Point, hint: usize) -> Option<usize> {
        let mut t = hint.min(self.tris.len() - 1);
        'walk: for _ in 0..self.tris.len() {
            let tri = self.tris[t];
            for k in 0..3 {
                let (a, b) = (tri[k], tri[(k + 1) % 3]);
                if orient(self.pts[a], self.pts[b], p) < 0.0 {
                    match self.owner.get(&(b, a)) {
                        Some(&next) => {
                            t = next;
                            continue 'walk;
                        }
                        None => break 'walk,
                    }
                }
            }
            return Some(t);
        }
        (0..self.tris.len()).find(|&t| {
            let [a, b, c] = self.tris[t];
            let (pa, pb, pc) = (self.pts[a], self.pts[b], self.pts[c]);
            orient(pa, pb, p) >= 0.0 && orient(pb, pc, p) >= 0.0 && orient(pc, pa, p) >= 0.0
        })
    }

    /// Splits the edge `a -> b` (owned by a triangle) at the new node `p`.
    fn split_edge(&mut self, a: usize, b: usize, p: usize) {
        let t = self.owner[&(a, b)];
        let c = self.third(t, a, b);
        let twin = self.owner.get(&(b, a)).copied();
        self.set(t, [a, p, c]);
        self.push([p, b, c]);
        if let Some(u) = twin {
            let d = self.third(u, b, a);
            self.set(u, [b, p, d]);
            self.push([p, a, d]);
        }
        if self.constrained.remove(&undirected(a, b)) {
            self.constrained.insert(undirected(a, p));
            self.constrained.insert(undirected(p, b));
        }
    }

    fn insert_interior(&mut self, p: Point, hint: usize) -> Result<usize> {
        let t = self.locate(p, hint).ok_or_else(|| {
            Error::InvalidDomain(format!("Steiner point ({}, {}) outside the mesh", p.x, p.y))
        })?;
        let idx = self.pts.len();
        self.pts.push(p);
        let [a, b, c] = self.tris[t];
        for (u, v) in [(a, b), (b, c), (c, a)] {
            if orient(self.pts[u], self.pts[v], p) == 0.0 {
                if self.constrained.contains(&undirected(u, v)) {
                    return Err(Error::InvalidDomain("Steiner point on the boundary".into()));
                }
                self.split_edge(u, v, idx);
                return Ok(t);
            }
        }
        self.set(t, [a, b, idx]);
        self.push([b, c, idx]);
        self.push([c, a, idx]);
        Ok(t)
    }

    /// Lawson flips until every unconstrained edge is locally Delaunay.
    /// Cocircular quads take the diagonal with positive slope so lattice
    /// cells are split consistently.
    fn legalize_all(&mut self) {
        let mut stack: Vec<Edge> = self
            .owner
            .keys()
            .filter(|&&(a, b)| a < b)
            .copied()
            .collect();
        stack.sort_unstable();
        let mut budget = 50 * self.tris.len() + 1000;
        while let Some((u, v)) = stack.pop() {
            if budget == 0 {
                debug_assert!(false, "flip budget exhausted");
                break;
            }
            if self.constrained.contains(&undirected(u, v)) {
                continue;
            }
            let (Some(&t1), Some(&t2)) = (self.owner.get(&(u, v)), self.owner.get(&(v, u))) else {
                continue;
            };
            let w1 = self.third(t1, u, v);
            let w2 = self.third(t2, v, u);
            let (pu, pv, p1, p2) = (self.pts[u], self.pts[v], self.pts[w1], self.pts[w2]);
            if orient(pu, p2, p1) <= 0.0 || orient(p2, pv, p1) <= 0.0 {
                continue;
            }
            let flip = match incircle_sign(pu, pv, p1, p2) {
                1 => true,
                0 => diagonal_rank(p1, p2) < diagonal_rank(pu, pv),
                _ => false,
            };
            if !flip {
                continue;
            }
            budget -= 1;
            self.set(t1, [u, w2, w1]);
            self.set(t2, [w2, v, w1]);
            stack.extend([(u, w2), (w2, v), (v, w1), (w1, u)]);
        }
    }
}

/// +1 if `d` is strictly inside the circumcircle of CCW `(a, b, c)`, 0 when
/// cocircular within a tolerance, -1 otherwise. The tolerance applies to the
/// power of `d` with respect to the circle, so nearly collinear quads (whose
/// raw determinant is also tiny) are still decided by sign.
fn incircle_sign(a: Point, b: Point, c: Point, d: Point) -> i8 {
    let det = incircle(a, b, c, d);
    let power = det / orient(a, b, c);
    let pts = [a, b, c, d];
    let mut diam2: f64 = 0.0;
    for i in 0..4 {
        for j in i + 1..4 {
            let (dx, dy) = (pts[i].x - pts[j].x, pts[i].y - pts[j].y);
            diam2 = diam2.max(dx * dx + dy * dy);
        }
    }
    if power.abs() <= 1e-10 * diam2 {
        0
    } else if det > 0.0 {
        1
    } else {
        -1
    }
}

fn diagonal_rank(p: Point, q: Point) -> u8 {
    let s = (q.x - p.x) * (q.y - p.y);
    if s > 0.0 {
        0
    } else if s < 0.0 {
        2
    } else {
        1
    }
}

fn collinear_overlap(a1: Point, a2: Point, b1: Point, b2: Point) -> bool {
    if orient(a1, a2, b1) != 0.0 || orient(a1, a2, b2) != 0.0 {
        return false;
    }
    let (dx, dy) = (a2.x - a1.x, a2.y - a1.y);
    let t = |p: Point| (p.x - a1.x) * dx + (p.y - a1.y) * dy;
    let len2 = dx * dx + dy * dy;
    let (lo, hi) = (t(b1).min(t(b2)), t(b1).max(t(b2)));
    hi.min(len2) - lo.max(0.0) > 0.0
}

/// `h` is strictly inside the interior wedge at ring vertex `v` (prev `a`,
/// next `c`) of a counterclockwise ring.
fn locally_inside(a: Point, v: Point, c: Point, h: Point) -> bool {
    if orient(a, v, c) > 0.0 {
        orient(v, c, h) > 0.0 && orient(a, v, h) > 0.0
    } else {
        orient(v, c, h) > 0.0 || orient(a, v, h) > 0.0
    }
}

/// Joins every hole to the ring with a bridge cut; returns the merged ring.
fn merge_holes(pts: &[Point], outer: Vec<usize>, holes: &[Vec<usize>]) -> Result<Vec<usize>> {
    let loops_pts: Vec<Vec<Point>> = std::iter::once(&outer)
        .chain(holes.iter())
        .map(|l| l.iter().map(|&i| pts[i]).collect())
        .collect();
    let inside_domain = |p: Point| {
        point_in_loop(p, &loops_pts[0]) && !loops_pts[1..].iter().any(|h| point_in_loop(p, h))
    };

    let rightmost = |h: &[usize]| {
        (0..h.len())
            .max_by(|&i, &j| {
                let (p, q) = (pts[h[i]], pts[h[j]]);
                p.x.total_cmp(&q.x).then(p.y.total_cmp(&q.y))
            })
            .expect("hole has vertices")
    };
    let mut order: Vec<usize> = (0..holes.len()).collect();
    order.sort_by(|&i, &j| {
        let (pi, pj) = (pts[holes[i][rightmost(&holes[i])]], pts[holes[j][rightmost(&holes[j])]]);
        pj.x.total_cmp(&pi.x).then(pj.y.total_cmp(&pi.y)).then(i.cmp(&j))
    });

    let mut ring = outer;
    let mut merged = vec![false; holes.len()];
    for &k in &order {
        let hole = &holes[k];
        let start = rightmost(hole);
        let hi = hole[start];
        let hp = pts[hi];

        let mut candidates: Vec<usize> = (0..ring.len()).collect();
        candidates.sort_by(|&i, &j| {
            hp.dist(pts[ring[i]])
                .total_cmp(&hp.dist(pts[ring[j]]))
                .then(i.cmp(&j))
        });

        let n = ring.len();
        let bridge_ok = |pos: usize| -> bool {
            let vi = ring[pos];
            let vp = pts[vi];
            let (a, c) = (pts[ring[(pos + n - 1) % n]], pts[ring[(pos + 1) % n]]);
            if !locally_inside(a, vp, c, hp) {
                return false;
            }
            if !inside_domain(vp.midpoint(hp)) {
                return false;
            }
            for j in 0..n {
                let (e0, e1) = (ring[j], ring[(j + 1) % n]);
                let (q0, q1) = (pts[e0], pts[e1]);
                if e0 == vi || e1 == vi {
                    if collinear_overlap(vp, hp, q0, q1) {
                        return false;
                    }
                } else if segments_intersect(vp, hp, q0, q1) {
                    return false;
                }
            }
            for (m, other) in holes.iter().enumerate() {
                if merged[m] {
                    continue;
                }
                let len = other.len();
                for j in 0..len {
                    let (e0, e1) = (other[j], other[(j + 1) % len]);
                    let (q0, q1) = (pts[e0], pts[e1]);
                    if e0 == hi || e1 == hi {
                        if collinear_overlap(vp, hp, q0, q1) {
                            return false;
                        }
                    } else if segments_intersect(vp, hp, q0, q1) {
                        return false;
                    }
                }
            }
            true
        };

        let pos = candidates
            .into_iter()
            .find(|&pos| bridge_ok(pos))
            .ok_or_else(|| Error::InvalidDomain(format!("no bridge found for hole {k}")))?;

        let mut spliced = Vec::with_capacity(ring.len() + hole.len() + 2);
        spliced.extend_from_slice(&ring[..=pos]);
        for step in 0..=hole.len() {
            spliced.push(hole[(start + step) % hole.len()]);
        }
        spliced.push(ring[pos]);
        spliced.extend_from_slice(&ring[pos + 1..]);
        ring = spliced;
        merged[k] = true;
    }
    Ok(ring)
}

/// Ear clipping of a (weakly simple) counterclockwise ring of node indices.
fn ear_clip(pts: &[Point], ring: &[usize]) -> Result<Vec<[usize; 3]>> {
    let mut ring = ring.to_vec();
    let mut tris = Vec::with_capacity(ring.len());
    let mut i = 0;
    let mut misses = 0;
    while ring.len() > 3 {
        let n = ring.len();
        let (ia, ib, ic) = ((i + n - 1) % n, i % n, (i + 1) % n);
        let (a, b, c) = (ring[ia], ring[ib], ring[ic]);
        let (pa, pb, pc) = (pts[a], pts[b], pts[c]);
        let is_ear = a != c
            && orient(pa, pb, pc) > 0.0
            && ring.iter().all(|&q| {
                if q == a || q == b || q == c {
                    return true;
                }
                let pq = pts[q];
                !(orient(pa, pb, pq) >= 0.0 && orient(pb, pc, pq) >= 0.0 && orient(pc, pa, pq) >= 0.0)
            });
        if is_ear {
            tris.push([a, b, c]);
            ring.remove(ib);
            misses = 0;
            i = if ib == 0 { 0 } else { ib - 1 };
        } else {
            misses += 1;
            if misses > n {
                return Err(Error::InvalidDomain(format!(
                    "ear clipping stalled with {n} ring vertices left"
                )));
            }
            i = (i + 1) % n;
        }
    }
    let (a, b, c) = (ring[0], ring[1], ring[2]);
    if orient(pts[a], pts[b], pts[c]) <= 0.0 {
        return Err(Error::InvalidDomain("degenerate final ear".into()));
    }
    tris.push([a, b, c]);
    Ok(tris)
}

fn is_rectilinear(domain: &PlanarDomain) -> bool {
    domain.loops().all(|l| {
        let n = l.len();
        (0..n).all(|i| {
            let (p, q) = (l[i], l[(i + 1) % n]);
            p.x == q.x || p.y == q.y
        })
    })
}

/// Sorted breakpoints refined so that consecutive gaps are at most `s`.
fn subdivide_axis(mut breaks: Vec<f64>, s: f64) -> Vec<f64> {
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    let mut out = Vec::new();
    for w in breaks.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let k = ((hi - lo) / s).ceil().max(1.0) as usize;
        out.push(lo);
        for j in 1..k {
            out.push(lo + (hi - lo) * j as f64 / k as f64);
        }
    }
    out.push(*breaks.last().expect("at least one breakpoint"));
    out
}

fn dist_to_segment(p: Point, a: Point, b: Point) -> f64 {
    let (dx, dy) = (b.x - a.x, b.y - a.y);
    let len2 = dx * dx + dy * dy;
    let t = (((p.x - a.x) * dx + (p.y - a.y) * dy) / len2).clamp(0.0, 1.0);
    p.dist(Point::new(a.x + t * dx, a.y + t * dy))
}

/// Constrained Delaunay triangulation with boundary edges split to length at
/// most `spacing` and interior Steiner points on a lattice of that spacing.
pub(crate) fn coarse_triangulation(domain: &PlanarDomain, spacing: f64) -> Result<Coarse> {
    let mut pts: Vec<Point> = Vec::with_capacity(domain.vertex_count());
    let mut loops: Vec<Vec<usize>> = Vec::new();
    for l in domain.loops() {
        let start = pts.len();
        pts.extend_from_slice(l);
        loops.push((start..pts.len()).collect());
    }
    let n_vertices = pts.len();

    let ring = merge_holes(&pts, loops[0].clone(), &loops[1..])?;
    let tris = ear_clip(&pts, &ring)?;
    let constrained: HashSet<Edge> = loops
        .iter()
        .flat_map(|l| (0..l.len()).map(move |i| undirected(l[i], l[(i + 1) % l.len()])))
        .collect();
    let mut cdt = Cdt::new(pts, tris, constrained);
    cdt.legalize_all();

    let rectilinear = is_rectilinear(domain);
    let (xs, ys) = if rectilinear {
        let all: Vec<Point> = domain.loops().flatten().copied().collect();
        (
            subdivide_axis(all.iter().map(|p| p.x).collect(), spacing),
            subdivide_axis(all.iter().map(|p| p.y).collect(), spacing),
        )
    } else {
        (vec![], vec![])
    };

    // Boundary split points, walking each loop edge in stored order.
    for l in &loops {
        let n = l.len();
        for i in 0..n {
            let (a, b) = (l[i], l[(i + 1) % n]);
            let (pa, pb) = (cdt.pts[a], cdt.pts[b]);
            let interior: Vec<Point> = if rectilinear {
                if pa.y == pb.y {
                    let mut v: Vec<f64> = xs
                        .iter()
                        .copied()
                        .filter(|&x| x > pa.x.min(pb.x) && x < pa.x.max(pb.x))
                        .collect();
                    if pb.x < pa.x {
                        v.reverse();
                    }
                    v.into_iter().map(|x| Point::new(x, pa.y)).collect()
                } else {
                    let mut v: Vec<f64> = ys
                        .iter()
                        .copied()
                        .filter(|&y| y > pa.y.min(pb.y) && y < pa.y.max(pb.y))
                        .collect();
                    if pb.y < pa.y {
                        v.reverse();
                    }
                    v.into_iter().map(|y| Point::new(pa.x, y)).collect()
                }
            } else {
                let k = (pa.dist(pb) / spacing).ceil().max(1.0) as usize;
                (1..k)
                    .map(|j| {
                        let t = j as f64 / k as f64;
                        Point::new(pa.x + t * (pb.x - pa.x), pa.y + t * (pb.y - pa.y))
                    })
                    .collect()
            };
            let mut prev = a;
            for p in interior {
                let idx = cdt.pts.len();
                cdt.pts.push(p);
                cdt.split_edge(prev, b, idx);
                prev = idx;
            }
        }
    }
    let n_boundary = cdt.pts.len();

    // Interior Steiner points.
    let outer = domain.outer();
    let inside = |p: Point| {
        point_in_loop(p, outer) && !domain.holes().iter().any(|h| point_in_loop(p, h))
    };
    let edges: Vec<(Point, Point)> = domain
        .loops()
        .flat_map(|l| (0..l.len()).map(move |i| (l[i], l[(i + 1) % l.len()])))
        .collect();
    let steiner: Vec<Point> = if rectilinear {
        let on_boundary = |p: Point| {
            edges.iter().any(|&(a, b)| {
                (a.y == b.y && p.y == a.y && p.x >= a.x.min(b.x) && p.x <= a.x.max(b.x))
                    || (a.x == b.x && p.x == a.x && p.y >= a.y.min(b.y) && p.y <= a.y.max(b.y))
            })
        };
        let mut v = Vec::new();
        for &y in &ys {
            for &x in &xs {
                let p = Point::new(x, y);
                if !on_boundary(p) && inside(p) {
                    v.push(p);
                }
            }
        }
        v
    } else {
        let (mut x0, mut y0) = (f64::INFINITY, f64::INFINITY);
        let (mut x1, mut y1) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in outer {
            x0 = x0.min(p.x);
            y0 = y0.min(p.y);
            x1 = x1.max(p.x);
            y1 = y1.max(p.y);
        }
        let nx = ((x1 - x0) / spacing).ceil() as usize;
        let ny = ((y1 - y0) / spacing).ceil() as usize;
        let mut v = Vec::new();
        for j in 1..ny {
            for i in 1..nx {
                let p = Point::new(x0 + i as f64 * spacing, y0 + j as f64 * spacing);
                if inside(p) && edges.iter().all(|&(a, b)| dist_to_segment(p, a, b) >= 0.5 * spacing)
                {
                    v.push(p);
                }
            }
        }
        v
    };
    let mut hint = 0;
    for p in steiner {
        hint = cdt.insert_interior(p, hint)?;
    }
    cdt.legalize_all();

    let mut boundary = vec![false; cdt.pts.len()];
    boundary[..n_boundary].iter_mut().for_each(|b| *b = true);
    debug_assert!(n_vertices <= n_boundary);
    Ok(Coarse {
        nodes: cdt.pts,
        triangles: cdt.tris,
        boundary,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{make_comb, make_rectangle, make_waffle};

    fn total_area(c: &Coarse) -> f64 {
        c.triangles
            .iter()
            .map(|&[a, b, d]| 0.5 * orient(c.nodes[a], c.nodes[b], c.nodes[d]))
            .sum()
    }

    #[test]
    fn square_without_steiner_points_is_two_triangles() {
        let d = make_rectangle(1.0).unwrap();
        let c = coarse_triangulation(&d, 2.0).unwrap();
        assert_eq!(c.triangles.len(), 2);
        assert_eq!(c.nodes.len(), 4);
    }

    #[test]
    fn lattice_cells_split_on_positive_diagonal() {
        let d = make_rectangle(2.0).unwrap();
        let c = coarse_triangulation(&d, 0.5).unwrap();
        assert_eq!(c.nodes.len(), 5 * 3);
        assert_eq!(c.triangles.len(), 16);
        for &[a, b, e] in &c.triangles {
            for (u, v) in [(a, b), (b, e), (e, a)] {
                let (p, q) = (c.nodes[u], c.nodes[v]);
                assert!((q.x - p.x) * (q.y - p.y) >= 0.0, "anti-diagonal edge {p:?}-{q:?}");
            }
        }
    }

    #[test]
    fn holes_and_notches_cover_exact_area() {
        for d in [make_waffle(3).unwrap(), make_comb(4).unwrap()] {
            for s in [5.0, 1.0, 0.3] {
                let c = coarse_triangulation(&d, s).unwrap();
                assert!((total_area(&c) - d.area()).abs() < 1e-12 * d.area());
                assert!(c
                    .triangles
                    .iter()
                    .all(|&[a, b, e]| orient(c.nodes[a], c.nodes[b], c.nodes[e]) > 0.0));
            }
        }
    }
}
