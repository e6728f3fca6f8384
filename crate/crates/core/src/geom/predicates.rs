//! Orientation and segment-intersection predicates.
//!
//! Orientation signs come from Shewchuk's adaptive exact predicates, so
//! collinearity decisions are consistent no matter which endpoint the
//! differences are taken from.

use super::Point;

fn coord(p: Point) -> robust::Coord<f64> {
    robust::Coord { x: p.x, y: p.y }
}

/// Twice the signed area of `(a, b, c)` with an exact sign: positive for a
/// left turn, zero only when exactly collinear.
pub fn orient(a: Point, b: Point, c: Point) -> f64 {
    robust::orient2d(coord(a), coord(b), coord(c))
}

/// Positive when `d` lies strictly inside the circumcircle of the
/// counterclockwise triangle `(a, b, c)`, zero when exactly cocircular.
pub fn incircle(a: Point, b: Point, c: Point, d: Point) -> f64 {
    robust::incircle(coord(a), coord(b), coord(c), coord(d))
}

fn sign(v: f64) -> i8 {
    if v > 0.0 {
        1
    } else if v < 0.0 {
        -1
    } else {
        0
    }
}

/// `p` lies in the axis-aligned box of `a`-`b` (used for collinear cases).
fn on_segment_box(a: Point, b: Point, p: Point) -> bool {
    p.x >= a.x.min(b.x) && p.x <= a.x.max(b.x) && p.y >= a.y.min(b.y) && p.y <= a.y.max(b.y)
}

/// True iff the closed segments `a1-a2` and `b1-b2` share at least one point.
pub fn segments_intersect(a1: Point, a2: Point, b1: Point, b2: Point) -> bool {
    let d1 = sign(orient(b1, b2, a1));
    let d2 = sign(orient(b1, b2, a2));
    let d3 = sign(orient(a1, a2, b1));
    let d4 = sign(orient(a1, a2, b2));

    if d1 * d2 < 0 && d3 * d4 < 0 {
        return true;
    }
    (d1 == 0 && on_segment_box(b1, b2, a1))
        || (d2 == 0 && on_segment_box(b1, b2, a2))
        || (d3 == 0 && on_segment_box(a1, a2, b1))
        || (d4 == 0 && on_segment_box(a1, a2, b2))
}

/// Twice the signed area of a closed loop (shoelace).
pub fn signed_area2(loop_: &[Point]) -> f64 {
    let n = loop_.len();
    (0..n)
        .map(|i| {
            let (p, q) = (loop_[i], loop_[(i + 1) % n]);
            p.x * q.y - q.x * p.y
        })
        .sum()
}

/// Even-odd point-in-polygon test; points on the boundary may go either way.
pub fn point_in_loop(p: Point, loop_: &[Point]) -> bool {
    let n = loop_.len();
    let mut inside = false;
    let mut j = n - 1;
    for i in 0..n {
        let (a, b) = (loop_[i], loop_[j]);
        if (a.y > p.y) != (b.y > p.y) {
            let x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if p.x < x {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}

/// True iff the closed loop has no pair of non-adjacent edges touching and no
/// adjacent edges overlapping. O(E²).
pub fn loop_is_simple(loop_: &[Point]) -> bool {
    let n = loop_.len();
    if n < 3 {
        return false;
    }
    for i in 0..n {
        let (a1, a2) = (loop_[i], loop_[(i + 1) % n]);
        if a1 == a2 {
            return false;
        }
        for j in (i + 1)..n {
            let (b1, b2) = (loop_[j], loop_[(j + 1) % n]);
            let adjacent = j == i + 1 || (i == 0 && j == n - 1);
            if adjacent {
                // Shared vertex is fine; folding back onto the previous edge is not.
                let (shared, other_a, other_b) = if j == i + 1 {
                    (a2, a1, b2)
                } else {
                    (a1, a2, b1)
                };
                if orient(shared, other_a, other_b) == 0.0
                    && (other_b.x - shared.x) * (other_a.x - shared.x)
                        + (other_b.y - shared.y) * (other_a.y - shared.y)
                        > 0.0
                {
                    return false;
                }
                continue;
            }
            if segments_intersect(a1, a2, b1, b2) {
                return false;
            }
        }
    }
    true
}

/// True iff any edge of loop `a` touches any edge of loop `b`.
pub fn loops_touch(a: &[Point], b: &[Point]) -> bool {
    let (na, nb) = (a.len(), b.len());
    for i in 0..na {
        for j in 0..nb {
            if segments_intersect(a[i], a[(i + 1) % na], b[j], b[(j + 1) % nb]) {
                return true;
            }
        }
    }
    false
}
