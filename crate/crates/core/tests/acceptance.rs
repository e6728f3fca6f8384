//! Acceptance report: one PASS/FAIL line per criterion.
//!
//! Exits non-zero on any failure other than the known disagreement with the
//! published two-decimal zero table (two printed entries differ from the
//! zeros of the defining functions).

use std::time::{Duration, Instant};

use isospec::analytic::{self, RectangleSpec};
use isospec::counting::{self, CountOptions};
use isospec::eig::{dense, EigenSolver};
use isospec::fem::{assemble, BoundaryCondition};
use isospec::geom::{self, PlanarDomain, Point};
use isospec::mesh::{refine_with_cap, triangulate, Mesh, DEFAULT_NODE_CAP};
use isospec::specfun;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

/// Two-decimal entries as printed: rows n = 2..7, columns p(1), p(2), p(3), j.
const PUBLISHED: [[f64; 4]; 6] = [
    [1.84, 3.05, 4.42, 2.40],
    [2.08, 3.34, 4.51, 3.14],
    [2.30, 3.61, 4.81, 3.83],
    [2.52, 3.86, 5.09, 4.49],
    [2.69, 4.10, 5.37, 5.14],
    [2.86, 4.33, 5.63, 5.76],
];

fn table1() -> Outcome {
    let t = Instant::now();
    let rows = match analytic::table1() {
        Ok(r) => r,
        Err(e) => return outcome(false, e.to_string()),
    };
    let mut bad = Vec::new();
    for (row, published) in rows.iter().zip(PUBLISHED) {
        let ours = [row.p[0], row.p[1], row.p[2], row.j];
        for (c, (&v, &p)) in ours.iter().zip(&published).enumerate() {
            if (v - p).abs() > 0.005 {
                bad.push(format!("n={} col {}: {v:.4} vs {p}", row.n, c + 1));
            }
        }
    }
    let elapsed = t.elapsed();
    let ok = bad.is_empty() && elapsed < Duration::from_secs(5);
    outcome(
        ok,
        format!("{} of 24 entries within 0.005 in {elapsed:.2?}; mismatches: {bad:?}", 24 - bad.len()),
    )
}

fn rectangle_chain() -> Outcome {
    let t = Instant::now();
    let opts = CountOptions::default();
    let mut notes = Vec::new();
    let mut ok = true;
    for ell in [1.0, 1.5, 2.0, 3.0, 5.0, 8.0] {
        let expected = 3 + (ell * ell + 1.0_f64).sqrt().floor() as usize;
        let i_exact = 4.0 * (1.0 + ell) * (1.0 + ell) / ell;
        match geom::make_rectangle(ell).and_then(|d| counting::compute_n(&d, &opts)) {
            Ok(r) => {
                let i_err = ((r.isoperimetric_ratio - i_exact) / i_exact).abs();
                ok &= r.n_count == expected && r.converged && i_err <= 1e-10;
                notes.push(format!("l={ell}: N={} (want {expected}) converged={} I err {i_err:.1e}", r.n_count, r.converged));
            }
            Err(e) => {
                ok = false;
                notes.push(format!("l={ell}: {e}"));
            }
        }
    }
    let elapsed = t.elapsed();
    ok &= elapsed < Duration::from_secs(120);
    outcome(ok, format!("{} in {elapsed:.2?}", notes.join("; ")))
}

fn asymptotic_slope() -> Outcome {
    let n = match analytic::rectangle_n_2d(50.0) {
        Ok(n) => n,
        Err(e) => return outcome(false, e.to_string()),
    };
    let i = analytic::rectangle_i(&RectangleSpec::new(&[1.0, 50.0]).expect("valid"));
    let ratio = n as f64 / i;
    outcome((0.24..=0.27).contains(&ratio), format!("l=50: N={n}, I={i:.2}, N/I={ratio:.4}"))
}

fn regular_polygons() -> Outcome {
    let t = Instant::now();
    let opts = CountOptions::default();
    let mut ok = true;
    let mut notes = Vec::new();
    for (m, expected) in [(4, 4), (5, 3), (6, 3), (8, 3), (12, 3)] {
        match geom::make_regular_polygon(m).and_then(|d| counting::compute_n(&d, &opts)) {
            Ok(r) => {
                ok &= r.n_count == expected;
                notes.push(format!("m={m}: N={} (want {expected})", r.n_count));
            }
            Err(e) => {
                ok = false;
                notes.push(format!("m={m}: {e}"));
            }
        }
    }
    let elapsed = t.elapsed();
    ok &= elapsed < Duration::from_secs(120);
    outcome(ok, format!("{} in {elapsed:.2?}", notes.join("; ")))
}

fn ball_counts() -> Outcome {
    let t = Instant::now();
    let mut ok = true;
    let mut notes = Vec::new();
    for n in 2..=12u32 {
        let count = match analytic::ball_n(n) {
            Ok(b) => b.count,
            Err(e) => return outcome(false, format!("n={n}: {e}")),
        };
        let count_f: f64 = count.to_string().parse().expect("integer");
        let nf = n as f64;
        let mut row_ok = match n {
            2 => count_f == 3.0,
            3 => count_f == 4.0,
            _ => count_f > nf + 1.0,
        };
        let nu = nf / 2.0;
        let p2 = specfun::bessel_zero_p(nu, 2, 1).map(|r| r.value);
        let j = specfun::bessel_zero_j(nu - 1.0, 1).map(|r| r.value);
        let quadratic = match (p2, j) {
            (Ok(p2), Ok(j)) => p2 < j,
            _ => return outcome(false, format!("n={n}: zero computation failed")),
        };
        if quadratic {
            row_ok &= count_f >= 0.5 * nf * (nf + 3.0);
        }
        ok &= row_ok;
        notes.push(format!("{n}:{count}{}", if quadratic { "*" } else { "" }));
    }
    let elapsed = t.elapsed();
    ok &= elapsed < Duration::from_secs(10);
    outcome(
        ok,
        format!("N(B^n) for n=2..12: {} (* = quadratic bound applies) in {elapsed:.2?}", notes.join(" ")),
    )
}

fn sandwich() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut failures = Vec::new();
    let mut worst = (f64::INFINITY, 0.0_f64);
    for n in 2..=4 {
        for _ in 0..50 {
            let lengths: Vec<f64> = (0..n).map(|_| rng.gen_range(0.5..8.0)).collect();
            let spec = RectangleSpec::new(&lengths).expect("positive");
            match analytic::rectangle_sandwich_check(&spec) {
                Ok(c) if c.lower_ok && c.upper_ok => {
                    worst = (worst.0.min(c.ratio_lower), worst.1.max(c.ratio_upper));
                }
                Ok(c) => failures.push(format!("{lengths:?}: {c:?}")),
                Err(e) => failures.push(format!("{lengths:?}: {e}")),
            }
        }
    }
    outcome(
        failures.is_empty(),
        format!(
            "150 boxes; min N/(c_lo I) = {:.3}, max N/(c_hi I) = {:.3}; failures: {failures:?}",
            worst.0, worst.1
        ),
    )
}

fn richardson(fine: f64, coarse: f64) -> f64 {
    (4.0 * fine - coarse) / 3.0
}

fn meshes_up_to(domain: &PlanarDomain, levels: usize) -> Vec<Mesh> {
    let mut mesh = triangulate(domain, domain.diameter() / 8.0).expect("mesh");
    while mesh.boundary_flags().iter().all(|&b| b) {
        mesh = refine_with_cap(&mesh, DEFAULT_NODE_CAP).expect("refine");
    }
    let mut out = vec![mesh];
    while out.len() < levels {
        let next = refine_with_cap(out.last().expect("non-empty"), DEFAULT_NODE_CAP).expect("refine");
        out.push(next);
    }
    out
}

/// Inertia counts from the sparse factorization against the dense
/// eigenvalue oracle, at the counting threshold and between consecutive
/// dense eigenvalues.
fn inertia_agrees(mesh: &Mesh) -> Result<usize, String> {
    let mut checked = 0;
    let dir = assemble(mesh, BoundaryCondition::Dirichlet, 1).map_err(|e| e.to_string())?;
    let lambda1 = dense::dense_generalized_eigenvalues(&dir.k, &dir.m).map_err(|e| e.to_string())?[0];
    for bc in [BoundaryCondition::Dirichlet, BoundaryCondition::Neumann] {
        let pair = assemble(mesh, bc, 1).map_err(|e| e.to_string())?;
        let all = dense::dense_generalized_eigenvalues(&pair.k, &pair.m).map_err(|e| e.to_string())?;
        let mut taus = vec![lambda1 * (1.0 + 1e-8)];
        taus.extend(all.windows(2).take(40).filter(|w| w[1] > w[0] * (1.0 + 1e-6)).map(|w| 0.5 * (w[0] + w[1])));
        let mut sparse = EigenSolver::new(&pair).with_dense_limit(0);
        let mut small = EigenSolver::new(&pair);
        for tau in taus {
            let oracle = all.iter().filter(|&&v| v < tau).count();
            let s = sparse.count_leq_retry(tau).map_err(|e| e.to_string())?.n_below;
            let d = small.count_leq_retry(tau).map_err(|e| e.to_string())?.n_below;
            if s != oracle || d != oracle {
                return Err(format!("{bc:?} tau={tau}: sparse {s}, dense inertia {d}, oracle {oracle}"));
            }
            checked += 1;
        }
    }
    Ok(checked)
}

fn fem_accuracy() -> Outcome {
    let square = geom::make_rectangle(1.0).expect("square");
    let two_pi2 = 2.0 * std::f64::consts::PI.powi(2);
    let pi2 = std::f64::consts::PI.powi(2);
    let report = match counting::compute_n(&square, &CountOptions::default()) {
        Ok(r) => r,
        Err(e) => return outcome(false, e.to_string()),
    };
    let lam_err = (report.lambda1 - two_pi2).abs() / two_pi2;

    let meshes = meshes_up_to(&square, 4);
    let mu: Vec<f64> = meshes[2..]
        .iter()
        .map(|m| {
            let pair = assemble(m, BoundaryCondition::Neumann, 1).expect("assemble");
            EigenSolver::new(&pair).eigenvalues_below(1.2 * pi2, 2).expect("eigs")[1]
        })
        .collect();
    let mu_err = (richardson(mu[1], mu[0]) - pi2).abs() / pi2;

    let mut checked = 0;
    let mut meshes_checked = 0;
    let mut mismatch = None;
    for (family, param, seed) in counting::default_suite() {
        let domain = family.generate(param, seed).expect("generate");
        for mesh in meshes_up_to(&domain, 4) {
            if mesh.node_count() > 500 {
                break;
            }
            match inertia_agrees(&mesh) {
                Ok(k) => {
                    checked += k;
                    meshes_checked += 1;
                }
                Err(e) => {
                    mismatch.get_or_insert(format!("{family} {param} {seed:?}: {e}"));
                }
            }
        }
    }
    let ok = lam_err < 1e-3 && mu_err < 1e-3 && mismatch.is_none() && meshes_checked > 0;
    outcome(
        ok,
        format!(
            "lambda1 rel err {lam_err:.2e}, mu2 rel err {mu_err:.2e}; {checked} shifts on {meshes_checked} meshes <= 500 dof; {}",
            mismatch.unwrap_or_else(|| "all inertia counts match".into())
        ),
    )
}

fn universal_inequalities() -> Outcome {
    let t = Instant::now();
    let rows = counting::sweep_items(&counting::default_suite(), &CountOptions::default());
    let mut violations = Vec::new();
    let mut errors = Vec::new();
    let mut unconverged = Vec::new();
    let (mut ns, mut is) = (Vec::new(), Vec::new());
    for row in &rows {
        let label = format!("{} {}{}", row.family, row.param, row.seed.map(|s| format!(" seed {s}")).unwrap_or_default());
        match &row.outcome {
            Ok(r) => {
                ns.push(r.n_count as f64);
                is.push(r.isoperimetric_ratio);
                if !r.converged {
                    unconverged.push(label);
                    continue;
                }
                let floor = if row.family.is_convex() { 3 } else { 2 };
                if r.n_count < floor {
                    violations.push(format!("{label}: N={}", r.n_count));
                }
            }
            Err(e) => errors.push(format!("{label}: {e}")),
        }
    }
    let rho = counting::spearman(&ns, &is);
    let elapsed = t.elapsed();
    let ok = violations.is_empty() && errors.is_empty() && rho >= 0.9 && elapsed < Duration::from_secs(1800);
    outcome(
        ok,
        format!(
            "{} domains, {} reports, spearman(N, I) = {rho:.3}; unconverged: {unconverged:?}; violations: {violations:?}; errors: {errors:?}; {elapsed:.1?}",
            rows.len(),
            ns.len()
        ),
    )
}

fn cross(o: Point, a: Point, b: Point) -> f64 {
    (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x)
}

fn closed_segments_meet(a: Point, b: Point, c: Point, d: Point) -> bool {
    let within = |p: Point, q: Point, r: Point| {
        r.x >= p.x.min(q.x) && r.x <= p.x.max(q.x) && r.y >= p.y.min(q.y) && r.y <= p.y.max(q.y)
    };
    let (d1, d2, d3, d4) = (cross(c, d, a), cross(c, d, b), cross(a, b, c), cross(a, b, d));
    if d1 * d2 < 0.0 && d3 * d4 < 0.0 {
        return true;
    }
    (d1 == 0.0 && within(c, d, a))
        || (d2 == 0.0 && within(c, d, b))
        || (d3 == 0.0 && within(a, b, c))
        || (d4 == 0.0 && within(a, b, d))
}

/// Exhaustive pairwise check: non-adjacent edges are disjoint and adjacent
/// edges meet only at their shared vertex.
fn simple_by_brute_force(v: &[Point]) -> bool {
    let n = v.len();
    for i in 0..n {
        let (a, b) = (v[i], v[(i + 1) % n]);
        for j in i + 1..n {
            let (c, d) = (v[j], v[(j + 1) % n]);
            let adjacent = j == i + 1 || (i == 0 && j == n - 1);
            if adjacent {
                let (p, q, r) = if j == i + 1 { (a, b, d) } else { (c, a, b) };
                let folded = cross(p, q, r) == 0.0 && (q.x - p.x) * (r.x - q.x) + (q.y - p.y) * (r.y - q.y) < 0.0;
                if folded {
                    return false;
                }
            } else if closed_segments_meet(a, b, c, d) {
                return false;
            }
        }
    }
    true
}

fn random_polygons() -> Outcome {
    let mut bad = Vec::new();
    for n in [10usize, 20, 30] {
        for seed in 0..100u64 {
            let a = geom::make_random_polygon(n, seed);
            let b = geom::make_random_polygon(n, seed);
            match (a, b) {
                (Ok(a), Ok(b)) => {
                    let ccw: f64 = (0..n).map(|i| cross(Point::new(0.0, 0.0), a.outer()[i], a.outer()[(i + 1) % n])).sum();
                    if a.outer().len() != n || !simple_by_brute_force(a.outer()) || a.outer() != b.outer() || ccw <= 0.0 {
                        bad.push(format!("n={n} seed={seed}"));
                    }
                }
                _ => bad.push(format!("n={n} seed={seed}: generation failed")),
            }
        }
    }
    outcome(bad.is_empty(), format!("300 polygons checked; bad: {bad:?}"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome, bool); 9] = [
        ("zero table to 0.005", table1, true),
        ("rectangle chain", rectangle_chain, false),
        ("asymptotic slope", asymptotic_slope, false),
        ("regular polygons", regular_polygons, false),
        ("ball counts", ball_counts, false),
        ("sandwich bounds", sandwich, false),
        ("fem accuracy", fem_accuracy, false),
        ("universal inequalities", universal_inequalities, false),
        ("random polygon validity", random_polygons, false),
    ];
    let mut unexpected = 0;
    for (name, run, known_conflict) in criteria {
        let o = run();
        let tag = if o.pass { "PASS" } else { "FAIL" };
        let note = if !o.pass && known_conflict { " (known: printed values disagree with the defining zeros)" } else { "" };
        println!("{tag} {name}: {}{note}", o.detail);
        if !o.pass && !known_conflict {
            unexpected += 1;
        }
    }
    if unexpected > 0 {
        eprintln!("{unexpected} acceptance criteria failed");
        std::process::exit(1);
    }
}
