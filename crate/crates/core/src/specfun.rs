//! Bessel functions of the first kind for real order, and certified zeros of
//! `J_nu` and of the ultraspherical derivative `[x^(1-nu) J_(nu+l-1)(x)]'`.

use serde::Serialize;
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

/// Largest argument accepted by [`bessel_j`].
pub const MAX_ARGUMENT: f64 = 1.0e4;

/// Largest order accepted by [`bessel_j`].
pub const MAX_ORDER: f64 = 1.0e3;

/// Bisection stops once the bracket is this small relative to the zero.
pub const ZERO_REL_WIDTH: f64 = 1e-12;

const SCAN_STEP: f64 = 0.25;
const MAX_SCAN_STEPS: usize = 400_000;
const CF_MAXIT: usize = 100_000;
const EPS: f64 = 1e-16;
const FPMIN: f64 = 1e-300;

/// Ascending series `sum (-1)^k (x/2)^(2k+nu) / (k! Gamma(k+nu+1))`.
fn series(nu: f64, x: f64) -> f64 {
    if x == 0.0 {
        return if nu == 0.0 { 1.0 } else { 0.0 };
    }
    let half = 0.5 * x;
    let mut term = (nu * half.ln() - ln_gamma(nu + 1.0)).exp();
    let mut sum = term;
    let q = -half * half;
    let mut k = 0.0;
    loop {
        k += 1.0;
        term *= q / (k * (k + nu));
        sum += term;
        if k > half && term.abs() <= 1e-17 * sum.abs().max(1e-300) {
            break;
        }
        if k > 10_000.0 {
            break;
        }
    }
    sum
}

/// `(J_nu(x), J'_nu(x))` by Steed's method: a continued fraction for
/// `J'/J` at order `nu`, downward recurrence to an order in `[0, 1)`, and a
/// complex continued fraction for the normalisation. Requires `x >= 2`.
fn steed(nu: f64, x: f64) -> Result<(f64, f64)> {
    let nl = ((nu - x + 1.5) as i64).max(0) as usize;
    let xmu = nu - nl as f64;
    let xmu2 = xmu * xmu;
    let xi = 1.0 / x;
    let xi2 = 2.0 * xi;
    let w = xi2 / std::f64::consts::PI;

    let mut isign = 1.0;
    let mut h = (nu * xi).max(FPMIN);
    let mut b = xi2 * nu;
    let mut d = 0.0;
    let mut c = h;
    let mut converged = false;
    for _ in 0..CF_MAXIT {
        b += xi2;
        d = b - d;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = b - 1.0 / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        let del = c * d;
        h *= del;
        if d < 0.0 {
            isign = -isign;
        }
        if (del - 1.0).abs() < EPS {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::Range(format!("J continued fraction failed at nu={nu}, x={x}")));
    }

    let mut rjl = isign * FPMIN;
    let mut rjpl = h * rjl;
    let rjl1 = rjl;
    let rjp1 = rjpl;
    let mut fact = nu * xi;
    for _ in 0..nl {
        let rjtemp = fact * rjl + rjpl;
        fact -= xi;
        rjpl = fact * rjtemp - rjl;
        rjl = rjtemp;
    }
    if rjl == 0.0 {
        rjl = EPS;
    }
    let f = rjpl / rjl;

    let mut a = 0.25 - xmu2;
    let mut p = -0.5 * xi;
    let mut q = 1.0;
    let br = 2.0 * x;
    let mut bi = 2.0;
    let mut fact = a * xi / (p * p + q * q);
    let mut cr = br + q * fact;
    let mut ci = bi + p * fact;
    let mut den = br * br + bi * bi;
    let mut dr = br / den;
    let mut di = -bi / den;
    let mut dlr = cr * dr - ci * di;
    let mut dli = cr * di + ci * dr;
    let mut temp = p * dlr - q * dli;
    q = p * dli + q * dlr;
    p = temp;
    converged = false;
    for i in 2..CF_MAXIT {
        a += 2.0 * (i - 1) as f64;
        bi += 2.0;
        dr = a * dr + br;
        di = a * di + bi;
        if dr.abs() + di.abs() < FPMIN {
            dr = FPMIN;
        }
        fact = a / (cr * cr + ci * ci);
        cr = br + cr * fact;
        ci = bi - ci * fact;
        if cr.abs() + ci.abs() < FPMIN {
            cr = FPMIN;
        }
        den = dr * dr + di * di;
        dr /= den;
        di = -di / den;
        dlr = cr * dr - ci * di;
        dli = cr * di + ci * dr;
        temp = p * dlr - q * dli;
        q = p * dli + q * dlr;
        p = temp;
        if (dlr - 1.0).abs() + dli.abs() < EPS {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::Range(format!("complex continued fraction failed at nu={nu}, x={x}")));
    }
    let gam = (p - f) / q;
    let rjmu = (w / ((p - f) * gam + q)).sqrt().copysign(rjl);
    let scale = rjmu / rjl;
    Ok((rjl1 * scale, rjp1 * scale))
}

fn uses_series(nu: f64, x: f64) -> bool {
    x <= 8.0 || x * x <= 4.0 * (nu + 1.0)
}

fn check_args(nu: f64, x: f64) -> Result<()> {
    if !(0.0..=MAX_ORDER).contains(&nu) || !(0.0..=MAX_ARGUMENT).contains(&x) {
        return Err(Error::Range(format!("J_nu(x) needs 0 <= nu <= {MAX_ORDER}, 0 <= x <= {MAX_ARGUMENT}; got nu={nu}, x={x}")));
    }
    Ok(())
}

/// Bessel function of the first kind `J_nu(x)` for `nu >= 0`, `x >= 0`.
pub fn bessel_j(nu: f64, x: f64) -> Result<f64> {
    check_args(nu, x)?;
    if uses_series(nu, x) {
        Ok(series(nu, x))
    } else {
        steed(nu, x).map(|(j, _)| j)
    }
}

/// `J'_nu(x) = (nu / x) J_nu(x) - J_(nu+1)(x)` for `x > 0`.
pub fn bessel_j_deriv(nu: f64, x: f64) -> Result<f64> {
    check_args(nu, x)?;
    if x == 0.0 {
        return Err(Error::Range("J' evaluated at x = 0".into()));
    }
    if uses_series(nu, x) {
        Ok(nu / x * series(nu, x) - series(nu + 1.0, x))
    } else {
        steed(nu, x).map(|(_, jp)| jp)
    }
}

/// `d/dx [x^(1-nu) J_(nu+l-1)(x)]`.
pub fn ultraspherical_deriv(nu: f64, ell: u32, x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::Range(format!("ultraspherical derivative needs x > 0, got {x}")));
    }
    Ok(x.powf(-nu) * x * scaled_ultraspherical(nu, ell, x)?)
}

/// `x^(nu-1)` times [`ultraspherical_deriv`]: same zeros, no overflow.
fn scaled_ultraspherical(nu: f64, ell: u32, x: f64) -> Result<f64> {
    if ell == 0 {
        // [x^(1-nu) J_(nu-1)]' = -x^(1-nu) J_nu.
        return Ok(-bessel_j(nu, x)?);
    }
    let mu = nu + ell as f64 - 1.0;
    Ok((1.0 - nu) * bessel_j(mu, x)? / x + bessel_j_deriv(mu, x)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BesselZeroRecord {
    pub nu: f64,
    pub ell: u32,
    pub k: u32,
    pub value: f64,
    /// Certified sign-change bracket.
    pub bracket: (f64, f64),
}

fn bisect(f: &dyn Fn(f64) -> Result<f64>, mut lo: f64, mut hi: f64) -> Result<(f64, f64)> {
    let mut flo = f(lo)?;
    let fhi = f(hi)?;
    if flo == 0.0 {
        return Ok((lo, lo));
    }
    if fhi == 0.0 {
        return Ok((hi, hi));
    }
    if flo.signum() == fhi.signum() {
        return Err(Error::BracketSearch {
            what: "no sign change".into(),
            lo,
            hi,
        });
    }
    while hi - lo > ZERO_REL_WIDTH * hi {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid)?;
        if fm == 0.0 {
            return Ok((mid, mid));
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok((lo, hi))
}

fn record(nu: f64, ell: u32, k: u32, (lo, hi): (f64, f64)) -> BesselZeroRecord {
    BesselZeroRecord {
        nu,
        ell,
        k,
        value: 0.5 * (lo + hi),
        bracket: (lo, hi),
    }
}

/// The `k`-th positive zero of `J_nu`, found by scanning upward from `nu`
/// (below which `J_nu` has no positive zero) and bisecting.
pub fn bessel_zero_j(nu: f64, k: u32) -> Result<BesselZeroRecord> {
    if k == 0 || nu < 0.0 {
        return Err(Error::Parameter(format!("need k >= 1 and nu >= 0, got k={k}, nu={nu}")));
    }
    let f = |x: f64| bessel_j(nu, x);
    let mut lo = nu.max(1e-3);
    let mut flo = f(lo)?;
    let mut found = 0;
    for _ in 0..MAX_SCAN_STEPS {
        let hi = lo + SCAN_STEP;
        let fhi = f(hi)?;
        if flo.signum() != fhi.signum() || fhi == 0.0 {
            found += 1;
            if found == k {
                return Ok(record(nu, 0, k, bisect(&f, lo, hi)?));
            }
        }
        lo = hi;
        flo = fhi;
    }
    Err(Error::BracketSearch {
        what: format!("zero {k} of J_{nu}"),
        lo: nu,
        hi: lo,
    })
}

/// Lorch–Szegő bounds `(lower, upper)` on the square of the first zero of
/// the ultraspherical derivative for degree `ell >= 1`.
pub fn lorch_szego_bounds(nu: f64, ell: u32) -> (f64, f64) {
    let l = ell as f64;
    (
        2.0 * l * (nu + l) * (nu + l + 1.0) / (nu + 2.0 * l + 1.0),
        2.0 * l * (nu + l),
    )
}

/// The `k`-th positive zero of `[x^(1-nu) J_(nu+l-1)(x)]'`.
pub fn bessel_zero_p(nu: f64, ell: u32, k: u32) -> Result<BesselZeroRecord> {
    if !(nu > 0.0) || k == 0 {
        return Err(Error::Parameter(format!("need nu > 0 and k >= 1, got nu={nu}, k={k}")));
    }
    if ell == 0 {
        return bessel_zero_j(nu, k);
    }
    let f = |x: f64| scaled_ultraspherical(nu, ell, x);
    let (lo, hi) = if k == 1 {
        let (a, b) = lorch_szego_bounds(nu, ell);
        (a.sqrt(), b.sqrt())
    } else {
        // Zeros interlace with those of J_(nu+l-1).
        let mu = nu + ell as f64 - 1.0;
        (bessel_zero_j(mu, k - 1)?.value, bessel_zero_j(mu, k)?.value)
    };
    let (flo, fhi) = (f(lo)?, f(hi)?);
    if flo.signum() == fhi.signum() {
        return Err(Error::BracketSearch {
            what: format!("zero {k} of the ultraspherical derivative, nu={nu}, l={ell}"),
            lo,
            hi,
        });
    }
    Ok(record(nu, ell, k, bisect(&f, lo, hi)?))
}
