//! Planar polygonal domains, their exact measures, and the parametric
//! families used throughout the experiments.

pub mod predicates;
pub mod random;

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
pub use predicates::segments_intersect;
pub use random::{make_random_polygon, RandomPolygonState};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn dist(self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn midpoint(self, other: Point) -> Point {
        Point::new(0.5 * (self.x + other.x), 0.5 * (self.y + other.y))
    }
}

impl From<[f64; 2]> for Point {
    fn from([x, y]: [f64; 2]) -> Self {
        Self { x, y }
    }
}

impl From<Point> for [f64; 2] {
    fn from(p: Point) -> Self {
        [p.x, p.y]
    }
}

/// Where a domain came from: generator name, its numeric parameters, and the
/// seed for random families.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub generator: String,
    #[serde(default)]
    pub params: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl Provenance {
    pub fn new(generator: impl Into<String>, params: Vec<f64>, seed: Option<u64>) -> Self {
        Self {
            generator: generator.into(),
            params,
            seed,
        }
    }
}

/// A polygon with optional polygonal holes.
///
/// The outer loop is counterclockwise, every hole loop clockwise, all loops
/// simple, holes strictly inside the outer loop and pairwise disjoint. The
/// constructor checks all of this, so a `PlanarDomain` value is always valid.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PlanarDomain {
    label: String,
    provenance: Provenance,
    outer: Vec<Point>,
    holes: Vec<Vec<Point>>,
}

#[derive(Deserialize)]
struct DomainJson {
    #[serde(default)]
    label: String,
    #[serde(default)]
    provenance: Provenance,
    outer: Vec<Point>,
    #[serde(default)]
    holes: Vec<Vec<Point>>,
}

impl PlanarDomain {
    pub fn new(
        outer: Vec<Point>,
        holes: Vec<Vec<Point>>,
        label: impl Into<String>,
        provenance: Provenance,
    ) -> Result<Self> {
        let domain = Self {
            label: label.into(),
            provenance,
            outer,
            holes,
        };
        domain.validate()?;
        Ok(domain)
    }

    fn validate(&self) -> Result<()> {
        use predicates::{loop_is_simple, loops_touch, point_in_loop, signed_area2};

        let finite = |l: &[Point]| l.iter().all(|p| p.x.is_finite() && p.y.is_finite());
        if !finite(&self.outer) || !self.holes.iter().all(|h| finite(h)) {
            return Err(Error::InvalidDomain("non-finite coordinate".into()));
        }
        if self.outer.len() < 3 {
            return Err(Error::InvalidDomain("outer loop needs at least 3 vertices".into()));
        }
        if !loop_is_simple(&self.outer) {
            return Err(Error::InvalidDomain("outer loop is not simple".into()));
        }
        if signed_area2(&self.outer) <= 0.0 {
            return Err(Error::InvalidDomain(
                "outer loop must be counterclockwise with positive area".into(),
            ));
        }
        for (k, hole) in self.holes.iter().enumerate() {
            if hole.len() < 3 || !loop_is_simple(hole) {
                return Err(Error::InvalidDomain(format!("hole {k} is not a simple loop")));
            }
            if signed_area2(hole) >= 0.0 {
                return Err(Error::InvalidDomain(format!("hole {k} must be clockwise")));
            }
            if loops_touch(hole, &self.outer) || !hole.iter().all(|&p| point_in_loop(p, &self.outer))
            {
                return Err(Error::InvalidDomain(format!(
                    "hole {k} is not strictly inside the outer loop"
                )));
            }
            for (j, other) in self.holes.iter().enumerate().take(k) {
                if loops_touch(hole, other)
                    || point_in_loop(hole[0], other)
                    || point_in_loop(other[0], hole)
                {
                    return Err(Error::InvalidDomain(format!("holes {j} and {k} overlap")));
                }
            }
        }
        if self.area() <= 0.0 {
            return Err(Error::InvalidDomain("area must be positive".into()));
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: DomainJson = serde_json::from_str(text)?;
        Self::new(raw.outer, raw.holes, raw.label, raw.provenance)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("domain serialization cannot fail")
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn outer(&self) -> &[Point] {
        &self.outer
    }

    pub fn holes(&self) -> &[Vec<Point>] {
        &self.holes
    }

    /// Outer loop first, then holes.
    pub fn loops(&self) -> impl Iterator<Item = &[Point]> {
        std::iter::once(self.outer.as_slice()).chain(self.holes.iter().map(Vec::as_slice))
    }

    pub fn vertex_count(&self) -> usize {
        self.loops().map(<[Point]>::len).sum()
    }

    pub fn area(&self) -> f64 {
        let outer = predicates::signed_area2(&self.outer);
        let holes: f64 = self.holes.iter().map(|h| predicates::signed_area2(h).abs()).sum();
        0.5 * (outer - holes)
    }

    pub fn perimeter(&self) -> f64 {
        self.loops()
            .map(|l| {
                let n = l.len();
                (0..n).map(|i| l[i].dist(l[(i + 1) % n])).sum::<f64>()
            })
            .sum()
    }

    /// `perimeter² / area`; equals 4π for a disc and 16 for any square.
    pub fn isoperimetric_ratio(&self) -> f64 {
        let p = self.perimeter();
        p * p / self.area()
    }

    /// Largest distance between two outer vertices.
    pub fn diameter(&self) -> f64 {
        let mut d: f64 = 0.0;
        for (i, &p) in self.outer.iter().enumerate() {
            for &q in &self.outer[i + 1..] {
                d = d.max(p.dist(q));
            }
        }
        d
    }

    /// Copy with every coordinate multiplied by `c > 0`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::Parameter(format!("scale factor must be positive, got {c}")));
        }
        let s = |l: &[Point]| l.iter().map(|p| Point::new(c * p.x, c * p.y)).collect();
        Self::new(
            s(&self.outer),
            self.holes.iter().map(|h| s(h)).collect(),
            format!("{} x{c}", self.label),
            self.provenance.clone(),
        )
    }
}

impl fmt::Display for PlanarDomain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} ({} vertices, {} holes)",
            self.label,
            self.vertex_count(),
            self.holes.len()
        )
    }
}

fn square_loop(x0: f64, y0: f64, x1: f64, y1: f64, ccw: bool) -> Vec<Point> {
    let mut l = vec![
        Point::new(x0, y0),
        Point::new(x1, y0),
        Point::new(x1, y1),
        Point::new(x0, y1),
    ];
    if !ccw {
        l.reverse();
    }
    l
}

/// Axis-aligned rectangle `[0, ell] x [0, 1]`.
///
/// The counting formulas assume sides `1` and `ell >= 1`; a value below one
/// is the same rectangle with the sides swapped, so only `ell <= 0` is
/// rejected.
pub fn make_rectangle(ell: f64) -> Result<PlanarDomain> {
    if !(ell > 0.0 && ell.is_finite()) {
        return Err(Error::Parameter(format!("rectangle side must be positive, got {ell}")));
    }
    PlanarDomain::new(
        square_loop(0.0, 0.0, ell, 1.0, true),
        vec![],
        format!("rectangle l={ell}"),
        Provenance::new("rectangle", vec![ell], None),
    )
}

/// Comb with `m` teeth: `m` upright 1x2 teeth at even x offsets joined along
/// the base by `m - 1` unit squares. Area `3m - 1`, perimeter `6m`.
pub fn make_comb(m: usize) -> Result<PlanarDomain> {
    if m == 0 {
        return Err(Error::Parameter("comb needs at least one tooth".into()));
    }
    let width = (2 * m - 1) as f64;
    let mut outer = vec![Point::new(0.0, 0.0), Point::new(width, 0.0)];
    for i in (0..m).rev() {
        let x = 2.0 * i as f64;
        outer.push(Point::new(x + 1.0, 2.0));
        outer.push(Point::new(x, 2.0));
        if i > 0 {
            outer.push(Point::new(x, 1.0));
            outer.push(Point::new(x - 1.0, 1.0));
        }
    }
    PlanarDomain::new(
        outer,
        vec![],
        format!("comb m={m}"),
        Provenance::new("comb", vec![m as f64], None),
    )
}

/// Square of side `2m + 1` with `m²` unit holes at `[2i-1, 2i] x [2j-1, 2j]`.
pub fn make_waffle(m: usize) -> Result<PlanarDomain> {
    if m == 0 {
        return Err(Error::Parameter("waffle needs m >= 1".into()));
    }
    let side = (2 * m + 1) as f64;
    let mut holes = Vec::with_capacity(m * m);
    for j in 1..=m {
        for i in 1..=m {
            let (x0, y0) = ((2 * i - 1) as f64, (2 * j - 1) as f64);
            holes.push(square_loop(x0, y0, x0 + 1.0, y0 + 1.0, false));
        }
    }
    PlanarDomain::new(
        square_loop(0.0, 0.0, side, side, true),
        holes,
        format!("waffle m={m}"),
        Provenance::new("waffle", vec![m as f64], None),
    )
}

/// Regular `m`-gon inscribed in the unit circle, bottom edge horizontal.
pub fn make_regular_polygon(m: usize) -> Result<PlanarDomain> {
    if m < 3 {
        return Err(Error::Parameter(format!("regular polygon needs m >= 3, got {m}")));
    }
    let start = -0.5 * PI + PI / m as f64;
    let outer = (0..m)
        .map(|k| {
            let t = start + 2.0 * PI * k as f64 / m as f64;
            Point::new(t.cos(), t.sin())
        })
        .collect();
    PlanarDomain::new(
        outer,
        vec![],
        format!("regular m={m}"),
        Provenance::new("regular", vec![m as f64], None),
    )
}

/// Unit square minus a concentric axis-aligned square of side `s`.
pub fn make_square_annulus(s: f64) -> Result<PlanarDomain> {
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::Parameter(format!("annulus hole side must lie in (0, 1), got {s}")));
    }
    let (lo, hi) = (0.5 * (1.0 - s), 0.5 * (1.0 + s));
    PlanarDomain::new(
        square_loop(0.0, 0.0, 1.0, 1.0, true),
        vec![square_loop(lo, lo, hi, hi, false)],
        format!("annulus s={s}"),
        Provenance::new("annulus", vec![s], None),
    )
}

/// The parametric domain families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Rectangle,
    Comb,
    Waffle,
    Regular,
    Annulus,
    Random,
}

impl Family {
    pub const ALL: [Family; 6] = [
        Family::Rectangle,
        Family::Comb,
        Family::Waffle,
        Family::Regular,
        Family::Annulus,
        Family::Random,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Rectangle => "rectangle",
            Family::Comb => "comb",
            Family::Waffle => "waffle",
            Family::Regular => "regular",
            Family::Annulus => "annulus",
            Family::Random => "random",
        }
    }

    /// Whether every member is convex.
    pub fn is_convex(self) -> bool {
        matches!(self, Family::Rectangle | Family::Regular)
    }

    /// Builds the member with parameter `param`. The random family takes the
    /// vertex count as its parameter and requires a seed; the others reject
    /// one.
    pub fn generate(self, param: f64, seed: Option<u64>) -> Result<PlanarDomain> {
        let integer = || -> Result<usize> {
            if param >= 0.0 && param.fract() == 0.0 && param <= 1e9 {
                Ok(param as usize)
            } else {
                Err(Error::Parameter(format!("{} expects an integer parameter, got {param}", self.name())))
            }
        };
        match (self, seed) {
            (Family::Random, None) => Err(Error::Parameter("random polygons need a seed".into())),
            (Family::Random, Some(s)) => make_random_polygon(integer()?, s),
            (_, Some(_)) => Err(Error::Parameter(format!("{} takes no seed", self.name()))),
            (Family::Rectangle, None) => make_rectangle(param),
            (Family::Comb, None) => make_comb(integer()?),
            (Family::Waffle, None) => make_waffle(integer()?),
            (Family::Regular, None) => make_regular_polygon(integer()?),
            (Family::Annulus, None) => make_square_annulus(param),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::Parameter(format!("unknown family {s:?}")))
    }
}
