//! The refinement pipeline for `N(Omega)`: the number of Neumann eigenvalues
//! at or below the first Dirichlet eigenvalue.
//!
//! Each level meshes the domain (the first by triangulation, the rest by
//! uniform refinement), computes the discrete `lambda_1`, counts Neumann
//! eigenvalues at or below it by inertia, and resolves the Neumann
//! eigenvalues in a relative window around `lambda_1`. The last two levels
//! are combined by Richardson extrapolation. Each window eigenvalue is then
//! classified as clearly below, clearly above, tied with `lambda_1`, or not
//! yet resolved.

use rayon::prelude::*;
use serde::Serialize;

use crate::eig::EigenSolver;
use crate::error::{Error, Result};
use crate::fem::{assemble, BoundaryCondition};
use crate::geom::{Family, PlanarDomain};
use crate::mesh::{refine_with_cap, triangulate_with_cap, Mesh, DEFAULT_NODE_CAP};

/// Reports whose final relative gap is below this are flagged.
pub const TIE_SUSPECT_GAP: f64 = 1e-4;

/// A window eigenvalue counts as separated once its extrapolated gap to
/// `lambda_1` exceeds this multiple of the extrapolation increment.
pub const SEPARATION_FACTOR: f64 = 10.0;

/// A window eigenvalue counts as tied with `lambda_1` when its extrapolated
/// gap is within this multiple of the extrapolation increment.
pub const TIE_FACTOR: f64 = 0.25;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CountOptions {
    /// Initial mesh size; `None` means diameter / 8.
    pub h0: Option<f64>,
    pub max_levels: usize,
    /// Levels computed before convergence is tested.
    pub min_levels: usize,
    /// Relative shift that places exact discrete ties below the threshold.
    pub tie_rel_tol: f64,
    /// Relative half-width of the eigenvalue window around `lambda_1`.
    pub window: f64,
    /// Lagrange element degree, 1 or 2.
    pub degree: u8,
    pub node_cap: usize,
}

impl Default for CountOptions {
    fn default() -> Self {
        Self {
            h0: None,
            max_levels: 6,
            min_levels: 3,
            tie_rel_tol: 1e-8,
            window: 0.05,
            degree: 1,
            node_cap: DEFAULT_NODE_CAP,
        }
    }
}

impl CountOptions {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Parameter(m.into()));
        if let Some(h) = self.h0 {
            if !(h > 0.0 && h.is_finite()) {
                return bad("h0 must be positive");
            }
        }
        if self.max_levels < 2 || self.min_levels < 2 || self.min_levels > self.max_levels {
            return bad("need 2 <= min_levels <= max_levels");
        }
        if !(self.tie_rel_tol >= 0.0 && self.tie_rel_tol < 1e-2) {
            return bad("tie_rel_tol must lie in [0, 0.01)");
        }
        if !(self.window > 0.0 && self.window < 0.5) {
            return bad("window must lie in (0, 0.5)");
        }
        if !matches!(self.degree, 1 | 2) {
            return bad("degree must be 1 or 2");
        }
        Ok(())
    }

    /// Short stable digest of the options, for provenance columns.
    pub fn digest(&self) -> String {
        let text = serde_json::to_string(self).expect("options serialize");
        // FNV-1a.
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for b in text.bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x0100_0000_01b3);
        }
        format!("{h:016x}")
    }

    fn order(&self) -> f64 {
        2.0 * self.degree as f64
    }
}

/// One refinement level.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Level {
    pub h: f64,
    /// Neumann degrees of freedom.
    pub n_dof: usize,
    pub lambda1_h: f64,
    /// Neumann eigenvalues at or below `lambda1_h (1 + tie_rel_tol)`.
    pub n_h: usize,
    /// Neumann eigenvalues below the window.
    pub below_window: usize,
    /// Neumann eigenvalues inside the window, ascending.
    pub window: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Below,
    Above,
    Tie,
    Unresolved,
}

/// Classification of one window eigenvalue on the final level.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WindowEntry {
    /// Zero-based position in the Neumann spectrum.
    pub index: usize,
    pub mu_h: f64,
    pub mu_extrapolated: Option<f64>,
    /// `(mu - lambda_1) / lambda_1` with extrapolated values when available.
    pub rel_gap: f64,
    pub side: Side,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralReport {
    pub domain_label: String,
    pub family: String,
    pub params: Vec<f64>,
    pub seed: Option<u64>,
    pub isoperimetric_ratio: f64,
    /// Extrapolated first Dirichlet eigenvalue.
    pub lambda1: f64,
    #[serde(rename = "N")]
    pub n_count: usize,
    pub threshold_gap: f64,
    /// Relative change of `lambda1` from the last level to the
    /// extrapolated value.
    pub extrapolation_increment: f64,
    pub levels: Vec<Level>,
    pub window: Vec<WindowEntry>,
    pub converged: bool,
    pub tie_suspect: bool,
    pub flags: Vec<String>,
    pub options_digest: String,
}

impl SpectralReport {
    pub fn h_final(&self) -> f64 {
        self.levels.last().map_or(f64::NAN, |l| l.h)
    }

    pub fn n_dof_final(&self) -> usize {
        self.levels.last().map_or(0, |l| l.n_dof)
    }
}

fn compute_level(mesh: &Mesh, opts: &CountOptions) -> Result<Level> {
    let dir = assemble(mesh, BoundaryCondition::Dirichlet, opts.degree)?;
    let (lambda1_h, _) = EigenSolver::new(&dir).smallest_eigenvalue()?;
    drop(dir);
    let neu = assemble(mesh, BoundaryCondition::Neumann, opts.degree)?;
    let mut solver = EigenSolver::new(&neu);
    let n_h = solver.count_leq_retry(lambda1_h * (1.0 + opts.tie_rel_tol))?.n_below;
    let (below_window, est) =
        solver.eigenvalues_between(lambda1_h * (1.0 - opts.window), lambda1_h * (1.0 + opts.window))?;
    Ok(Level {
        h: mesh.h(),
        n_dof: neu.n_dof(),
        lambda1_h,
        n_h,
        below_window,
        window: est.values,
    })
}

fn richardson(fine: f64, coarse: f64, order: f64) -> f64 {
    let r = 2f64.powf(order);
    (r * fine - coarse) / (r - 1.0)
}

struct Assessment {
    lambda1: f64,
    increment: f64,
    entries: Vec<WindowEntry>,
    n_count: usize,
    resolved: bool,
}

/// Combines the last two levels.
fn assess(prev: &Level, cur: &Level, opts: &CountOptions) -> Assessment {
    let order = opts.order();
    let lambda1 = richardson(cur.lambda1_h, prev.lambda1_h, order);
    let inc_l = ((lambda1 - cur.lambda1_h) / lambda1).abs();
    // The window edges are only trustworthy when well outside the error.
    let mut resolved = opts.window > SEPARATION_FACTOR * inc_l;
    let mut n_count = cur.below_window;
    let mut entries = Vec::with_capacity(cur.window.len());
    for (j, &mu_h) in cur.window.iter().enumerate() {
        let index = cur.below_window + j;
        let gap_h = (mu_h - cur.lambda1_h) / cur.lambda1_h;
        let matched = index
            .checked_sub(prev.below_window)
            .and_then(|i| prev.window.get(i))
            .copied();
        let (mu_ex, rel_gap, side) = match matched {
            Some(mu_p) => {
                let mu_ex = richardson(mu_h, mu_p, order);
                let inc = inc_l.max(((mu_ex - mu_h) / mu_ex).abs());
                let gap = (mu_ex - lambda1) / lambda1;
                let side = if gap.abs() > SEPARATION_FACTOR * inc && gap.signum() == gap_h.signum() {
                    if gap < 0.0 {
                        Side::Below
                    } else {
                        Side::Above
                    }
                } else if gap.abs() <= opts.tie_rel_tol.max(TIE_FACTOR * inc) {
                    Side::Tie
                } else {
                    Side::Unresolved
                };
                (Some(mu_ex), gap, side)
            }
            None => {
                let side = if gap_h.abs() > SEPARATION_FACTOR * inc_l {
                    if gap_h < 0.0 {
                        Side::Below
                    } else {
                        Side::Above
                    }
                } else {
                    Side::Unresolved
                };
                (None, gap_h, side)
            }
        };
        match side {
            Side::Below | Side::Tie => n_count += 1,
            Side::Unresolved => resolved = false,
            Side::Above => {}
        }
        entries.push(WindowEntry {
            index,
            mu_h,
            mu_extrapolated: mu_ex,
            rel_gap,
            side,
        });
    }
    Assessment {
        lambda1,
        increment: inc_l,
        entries,
        n_count,
        resolved,
    }
}

/// Whether the raw counts of the last two levels agree, or differ only by
/// eigenvalues classified as ties (whose discrete side may flip).
fn counts_stable(prev: &Level, cur: &Level, a: &Assessment) -> bool {
    if prev.n_h == cur.n_h {
        return true;
    }
    let ties = a.entries.iter().filter(|e| e.side == Side::Tie).count();
    a.resolved && prev.n_h.abs_diff(cur.n_h) <= ties && a.n_count >= prev.n_h.max(cur.n_h)
}

/// Computes `N(Omega)` with the refinement loop, stopping early once the
/// count is certified stable.
pub fn compute_n(domain: &PlanarDomain, opts: &CountOptions) -> Result<SpectralReport> {
    opts.validate()?;
    let h0 = opts.h0.unwrap_or(domain.diameter() / 8.0);
    let mut levels: Vec<Level> = Vec::new();
    let mut mesh = triangulate_with_cap(domain, h0, opts.node_cap)?;
    // Thin features can leave a coarse mesh with no interior node, hence no
    // Dirichlet unknowns; such meshes are refined before the first level.
    while mesh.boundary_flags().iter().all(|&b| b) {
        mesh = refine_with_cap(&mesh, opts.node_cap)?;
    }
    let mut last: Option<(Assessment, bool)> = None;
    let mut flags = Vec::new();
    for depth in 0..opts.max_levels {
        if depth > 0 {
            match refine_with_cap(&mesh, opts.node_cap) {
                Ok(m) => mesh = m,
                Err(Error::Resource(msg)) => {
                    flags.push(format!("stopped early: {msg}"));
                    break;
                }
                Err(e) => return Err(e),
            }
        }
        levels.push(compute_level(&mesh, opts)?);
        if let [.., prev, cur] = levels.as_slice() {
            let a = assess(prev, cur, opts);
            let ok = a.resolved && counts_stable(prev, cur, &a);
            last = Some((a, ok));
            if ok && levels.len() >= opts.min_levels {
                break;
            }
        }
    }
    let cur = levels.last().ok_or(Error::EmptyMesh)?;
    let (lambda1, increment, entries, n_count, converged) = match last {
        Some((a, ok)) => {
            let n = if ok { a.n_count } else { cur.n_h };
            (a.lambda1, a.increment, a.entries, n, ok && levels.len() >= opts.min_levels)
        }
        None => (cur.lambda1_h, f64::NAN, vec![], cur.n_h, false),
    };
    let threshold_gap = entries.iter().map(|e| e.rel_gap.abs()).fold(opts.window, f64::min);
    let tie_suspect = threshold_gap < TIE_SUSPECT_GAP;
    if tie_suspect {
        flags.push("tie-suspect".into());
    }
    if n_count < 2 {
        flags.push(format!("count {n_count} violates the lower bound 2"));
    }
    let prov = domain.provenance();
    Ok(SpectralReport {
        domain_label: domain.label().to_string(),
        family: prov.generator.clone(),
        params: prov.params.clone(),
        seed: prov.seed,
        isoperimetric_ratio: domain.isoperimetric_ratio(),
        lambda1,
        n_count,
        threshold_gap,
        extrapolation_increment: increment,
        levels,
        window: entries,
        converged,
        tie_suspect,
        flags,
        options_digest: opts.digest(),
    })
}

/// One item of a sweep: a family member and its outcome.
#[derive(Debug)]
pub struct SweepRow {
    pub family: Family,
    pub param: f64,
    pub seed: Option<u64>,
    pub outcome: Result<SpectralReport>,
}

/// Runs [`compute_n`] on every `(param, seed)` item of one family.
pub fn sweep(family: Family, items: &[(f64, Option<u64>)], opts: &CountOptions) -> Vec<SweepRow> {
    let items: Vec<SweepItem> = items.iter().map(|&(param, seed)| (family, param, seed)).collect();
    sweep_items(&items, opts)
}

/// A family member: family, parameter, seed.
pub type SweepItem = (Family, f64, Option<u64>);

/// Runs [`compute_n`] on every item concurrently; rows come back in input
/// order and failures are kept per row.
pub fn sweep_items(items: &[SweepItem], opts: &CountOptions) -> Vec<SweepRow> {
    items
        .par_iter()
        .map(|&(family, param, seed)| SweepRow {
            family,
            param,
            seed,
            outcome: family.generate(param, seed).and_then(|d| compute_n(&d, opts)),
        })
        .collect()
}

/// The default experiment suite: rectangles `l = 1..10`, combs `m <= 6`,
/// waffles `m <= 4`, annuli `s = 0.1..0.9`, regular polygons `m = 3..12`
/// and 96, and random polygons with 5, 10, .., 30 sides and seeds 0 and 1.
pub fn default_suite() -> Vec<SweepItem> {
    let mut items: Vec<SweepItem> = Vec::new();
    items.extend((1..=10).map(|l| (Family::Rectangle, l as f64, None)));
    items.extend((1..=6).map(|m| (Family::Comb, m as f64, None)));
    items.extend((1..=4).map(|m| (Family::Waffle, m as f64, None)));
    items.extend((1..=9).map(|i| (Family::Annulus, i as f64 / 10.0, None)));
    items.extend((3..=12).chain([96]).map(|m| (Family::Regular, m as f64, None)));
    for sides in (5..=30).step_by(5) {
        items.extend((0..2).map(|seed| (Family::Random, sides as f64, Some(seed))));
    }
    items
}

/// One CSV line: `family,param,seed,I,N,lambda1,threshold_gap,h_final,
/// n_dof_final,converged`. Failed rows leave the numeric fields empty.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CsvRow {
    pub family: String,
    pub param: Option<f64>,
    pub seed: Option<u64>,
    #[serde(rename = "I")]
    pub isoperimetric_ratio: Option<f64>,
    #[serde(rename = "N")]
    pub n_count: Option<usize>,
    pub lambda1: Option<f64>,
    pub threshold_gap: Option<f64>,
    pub h_final: Option<f64>,
    pub n_dof_final: Option<usize>,
    pub converged: bool,
}

pub const CSV_HEADER: [&str; 10] = [
    "family",
    "param",
    "seed",
    "I",
    "N",
    "lambda1",
    "threshold_gap",
    "h_final",
    "n_dof_final",
    "converged",
];

impl CsvRow {
    pub fn from_report(family: &str, param: Option<f64>, seed: Option<u64>, r: &SpectralReport) -> Self {
        Self {
            family: family.to_string(),
            param,
            seed,
            isoperimetric_ratio: Some(r.isoperimetric_ratio),
            n_count: Some(r.n_count),
            lambda1: Some(r.lambda1),
            threshold_gap: Some(r.threshold_gap),
            h_final: Some(r.h_final()),
            n_dof_final: Some(r.n_dof_final()),
            converged: r.converged,
        }
    }

    pub fn failed(family: &str, param: Option<f64>, seed: Option<u64>, isoperimetric_ratio: Option<f64>) -> Self {
        Self {
            family: family.to_string(),
            param,
            seed,
            isoperimetric_ratio,
            n_count: None,
            lambda1: None,
            threshold_gap: None,
            h_final: None,
            n_dof_final: None,
            converged: false,
        }
    }
}

impl From<&SweepRow> for CsvRow {
    fn from(row: &SweepRow) -> Self {
        let name = row.family.name();
        match &row.outcome {
            Ok(r) => CsvRow::from_report(name, Some(row.param), row.seed, r),
            Err(_) => {
                let i = row.family.generate(row.param, row.seed).ok().map(|d| d.isoperimetric_ratio());
                CsvRow::failed(name, Some(row.param), row.seed, i)
            }
        }
    }
}

/// Spearman rank correlation with average ranks for ties.
pub fn spearman(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len());
    let rx = ranks(x);
    let ry = ranks(y);
    let n = x.len() as f64;
    let mx = rx.iter().sum::<f64>() / n;
    let my = ry.iter().sum::<f64>() / n;
    let cov: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - mx) * (b - my)).sum();
    let vx: f64 = rx.iter().map(|a| (a - mx).powi(2)).sum();
    let vy: f64 = ry.iter().map(|b| (b - my).powi(2)).sum();
    cov / (vx * vy).sqrt()
}

fn ranks(v: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut out = vec![0.0; v.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
            j += 1;
        }
        let r = 0.5 * (i + j) as f64 + 1.0;
        for &k in &idx[i..=j] {
            out[k] = r;
        }
        i = j + 1;
    }
    out
}
