//! The invariant suite behind `isospec check`.

use std::f64::consts::PI;

use isospec::analytic::{self, RectangleSpec};
use isospec::counting::{compute_n, CountOptions};
use isospec::geom::{self, predicates, Family};
use isospec::specfun::{bessel_zero_j, bessel_zero_p, lorch_szego_bounds};
use num_bigint::BigUint;

type Check = (&'static str, fn() -> Result<(), String>);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err(e: isospec::Error) -> String {
    e.to_string()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn closed_forms() -> Result<(), String> {
    for m in 1..=8 {
        let d = geom::make_comb(m).map_err(err)?;
        let want = 36.0 * (m * m) as f64 / (3 * m - 1) as f64;
        ensure(rel(d.isoperimetric_ratio(), want) < 1e-10, || format!("comb {m}"))?;
    }
    for m in [3, 4, 5, 6, 8, 12, 96] {
        let d = geom::make_regular_polygon(m).map_err(err)?;
        let want = 4.0 * m as f64 * (PI / m as f64).tan();
        ensure(rel(d.isoperimetric_ratio(), want) < 1e-10, || format!("regular {m}"))?;
    }
    for ell in [1.0, 1.5, 2.0, 3.0, 10.0] {
        let d = geom::make_rectangle(ell).map_err(err)?;
        let want = 4.0 * (1.0 + ell) * (1.0 + ell) / ell;
        ensure(rel(d.isoperimetric_ratio(), want) < 1e-10, || format!("rectangle {ell}"))?;
    }
    for m in 1..=8usize {
        let d = geom::make_waffle(m).map_err(err)?;
        let side = (2 * m + 1) as f64;
        ensure(d.area() == side * side - (m * m) as f64, || format!("waffle {m}"))?;
    }
    Ok(())
}

fn random_polygons_simple() -> Result<(), String> {
    for n in [10, 20, 30] {
        for seed in 0..20 {
            let d = geom::make_random_polygon(n, seed).map_err(err)?;
            let again = geom::make_random_polygon(n, seed).map_err(err)?;
            ensure(d == again, || format!("n={n} seed={seed} not deterministic"))?;
            ensure(d.vertex_count() == n, || format!("n={n} seed={seed} vertex count"))?;
            ensure(predicates::loop_is_simple(d.outer()), || format!("n={n} seed={seed} not simple"))?;
        }
    }
    Ok(())
}

fn bessel_zeros() -> Result<(), String> {
    let mut prev = 0.0;
    for i in 1..=20 {
        let nu = 0.5 * i as f64;
        let j = bessel_zero_j(nu, 1).map_err(err)?.value;
        ensure(j > prev, || format!("j_(nu,1) not increasing at nu={nu}"))?;
        prev = j;
        for ell in 1..=6 {
            let p = bessel_zero_p(nu, ell, 1).map_err(err)?;
            let (lo, hi) = lorch_szego_bounds(nu, ell);
            ensure(lo < p.value * p.value && p.value * p.value < hi, || {
                format!("Lorch-Szego bounds fail at nu={nu} l={ell}")
            })?;
            let jm = bessel_zero_j(nu + ell as f64 - 1.0, 1).map_err(err)?.value;
            let p2 = bessel_zero_p(nu, ell, 2).map_err(err)?.value;
            ensure(p.value < jm && jm < p2, || format!("interlacing fails at nu={nu} l={ell}"))?;
        }
    }
    Ok(())
}

fn rectangle_oracles() -> Result<(), String> {
    for i in 0..200 {
        let ell = 1.0 + 49.0 * i as f64 / 199.0;
        let a = analytic::rectangle_n_2d(ell).map_err(err)?;
        let b = analytic::rectangle_n_exact(&RectangleSpec::new(&[1.0, ell]).map_err(err)?).map_err(err)?;
        ensure(a == b, || format!("closed form {a} != lattice {b} at l={ell}"))?;
    }
    // Deterministic spread of boxes in dimensions 2..4.
    let sides = [0.2, 0.7, 1.0, 2.3, 5.0, 11.0, 20.0];
    for n in 2..=4usize {
        for k in 0..50usize {
            let l: Vec<f64> = (0..n).map(|i| sides[(k * (i + 3) + i * i) % sides.len()]).collect();
            let c = analytic::rectangle_sandwich_check(&RectangleSpec::new(&l).map_err(err)?).map_err(err)?;
            ensure(c.lower_ok && c.upper_ok, || format!("sandwich fails for {l:?}"))?;
        }
    }
    Ok(())
}

fn ball_counts() -> Result<(), String> {
    let count = |n| analytic::ball_n(n).map(|b| b.count).map_err(err);
    ensure(count(2)? == BigUint::from(3u32), || "N(B^2) != 3".into())?;
    ensure(count(3)? == BigUint::from(4u32), || "N(B^3) != 4".into())?;
    for n in 4..=12u32 {
        let c = count(n)?;
        ensure(c > BigUint::from(n + 1), || format!("N(B^{n}) = {c} <= n + 1"))?;
        let nu = n as f64 / 2.0;
        let p2 = bessel_zero_p(nu, 2, 1).map_err(err)?.value;
        let j = bessel_zero_j(nu - 1.0, 1).map_err(err)?.value;
        if p2 < j {
            ensure(c >= BigUint::from(n * (n + 3) / 2), || format!("N(B^{n}) below n(n+3)/2"))?;
        }
    }
    Ok(())
}

fn fem_counts() -> Result<(), String> {
    let opts = CountOptions::default();
    for (family, param, want) in [(Family::Rectangle, 1.0, 4), (Family::Rectangle, 2.0, 5), (Family::Regular, 5.0, 3)] {
        let d = family.generate(param, None).map_err(err)?;
        let r = compute_n(&d, &opts).map_err(err)?;
        ensure(r.converged && r.n_count == want, || {
            format!("{family} {param}: N={} converged={}", r.n_count, r.converged)
        })?;
    }
    Ok(())
}

pub fn run(fem: bool) -> Result<u8, super::Failure> {
    let mut checks: Vec<Check> = vec![
        ("geometry closed forms", closed_forms),
        ("random polygons simple and deterministic", random_polygons_simple),
        ("Bessel zero bounds, monotonicity, interlacing", bessel_zeros),
        ("box lattice counts and bounds", rectangle_oracles),
        ("ball counts", ball_counts),
    ];
    if fem {
        checks.push(("finite-element counts", fem_counts));
    }
    let mut failed = 0;
    for (name, f) in checks {
        match f() {
            Ok(()) => println!("ok    {name}"),
            Err(e) => {
                failed += 1;
                println!("FAIL  {name}: {e}");
            }
        }
    }
    Ok(if failed == 0 { 0 } else { 1 })
}
