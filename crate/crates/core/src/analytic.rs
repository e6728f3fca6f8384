//! Exact spectral counts for n-dimensional boxes and unit balls.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::specfun::{bessel_zero_j, bessel_zero_p, lorch_szego_bounds};

/// Largest dimension accepted by the lattice enumeration.
pub const MAX_RECT_DIM: usize = 8;

/// Largest predicted lattice count accepted by the enumeration.
pub const MAX_LATTICE_POINTS: f64 = 1e8;

/// Largest ball dimension handled by the ball routines.
pub const MAX_BALL_DIM: u32 = 64;

/// Side lengths of an n-dimensional box, optionally with exact rational
/// values used to settle lattice points lying on the ellipsoid boundary.
#[derive(Debug, Clone)]
pub struct RectangleSpec {
    lengths: Vec<f64>,
    exact: Vec<BigRational>,
}

impl RectangleSpec {
    pub fn new(lengths: &[f64]) -> Result<Self> {
        if lengths.is_empty() || lengths.iter().any(|&l| !(l > 0.0 && l.is_finite())) {
            return Err(Error::Parameter(format!("box side lengths must be positive, got {lengths:?}")));
        }
        let exact = lengths
            .iter()
            .map(|&l| BigRational::from_float(l).expect("finite"))
            .collect();
        Ok(Self {
            lengths: lengths.to_vec(),
            exact,
        })
    }

    /// Builds a spec from decimal strings such as `"1.5"` or `"2e-1"`,
    /// keeping their exact rational values.
    pub fn from_decimal(lengths: &[&str]) -> Result<Self> {
        let exact: Vec<BigRational> = lengths.iter().map(|s| parse_decimal(s)).collect::<Result<_>>()?;
        if exact.is_empty() || exact.iter().any(|l| !l.is_positive()) {
            return Err(Error::Parameter(format!("box side lengths must be positive, got {lengths:?}")));
        }
        let lengths = exact.iter().map(|l| l.to_f64().unwrap_or(f64::NAN)).collect();
        Ok(Self { lengths, exact })
    }

    pub fn dim(&self) -> usize {
        self.lengths.len()
    }

    pub fn lengths(&self) -> &[f64] {
        &self.lengths
    }

    /// `rho = sqrt(sum l_i^-2)`.
    pub fn rho(&self) -> f64 {
        self.lengths.iter().map(|l| l.powi(-2)).sum::<f64>().sqrt()
    }

    /// Semi-axes `a_i = l_i rho` of the counting ellipsoid.
    pub fn axes(&self) -> Vec<f64> {
        let rho = self.rho();
        self.lengths.iter().map(|l| l * rho).collect()
    }
}

/// Parses an optionally signed decimal with optional exponent into an exact
/// rational.
pub fn parse_decimal(s: &str) -> Result<BigRational> {
    let bad = || Error::Parameter(format!("not a decimal number: {s:?}"));
    let t = s.trim();
    let (mantissa, exp) = match t.find(['e', 'E']) {
        Some(i) => (&t[..i], t[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (t, 0),
    };
    let (neg, mantissa) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int, frac) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int.is_empty() && frac.is_empty() || !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits: BigUint = format!("{int}{frac}0").parse::<BigUint>().map_err(|_| bad())? / 10u32;
    let ten = BigRational::from_integer(10.into());
    let scale = exp - frac.len() as i32;
    let mut v = BigRational::from_integer(digits.into());
    v *= num_traits::pow::Pow::pow(&ten, scale);
    Ok(if neg { -v } else { v })
}

/// Membership test for `sum (m_i^2 - 1) / l_i^2 <= 0`, exact near the
/// boundary.
struct Ellipsoid {
    w: Vec<f64>,
    w_exact: Vec<BigRational>,
}

impl Ellipsoid {
    fn new(spec: &RectangleSpec) -> Self {
        Self {
            w: spec.lengths.iter().map(|l| l.powi(-2)).collect(),
            w_exact: spec.exact.iter().map(|l| (l * l).recip()).collect(),
        }
    }

    fn contains(&self, m: &[u64]) -> bool {
        let mut s = 0.0;
        let mut mag = 0.0;
        for (&mi, &w) in m.iter().zip(&self.w) {
            let q = (mi as f64) * (mi as f64);
            s += (q - 1.0) * w;
            mag += (q + 1.0) * w;
        }
        if s.abs() > 1e-12 * mag {
            return s < 0.0;
        }
        let mut e = BigRational::zero();
        for (&mi, w) in m.iter().zip(&self.w_exact) {
            let q = BigRational::from_integer((mi * mi).into()) - BigRational::one();
            e += q * w;
        }
        !e.is_positive()
    }
}

/// Volume of the unit ball in `R^n`.
pub fn unit_ball_volume(n: usize) -> f64 {
    let h = n as f64 / 2.0;
    (h * std::f64::consts::PI.ln() - ln_gamma(h + 1.0)).exp()
}

/// Number of nonnegative lattice points `m` with
/// `sum m_i^2 / l_i^2 <= sum 1 / l_i^2`: the Neumann eigenvalues of the box
/// at or below its first Dirichlet eigenvalue.
pub fn rectangle_n_exact(spec: &RectangleSpec) -> Result<u64> {
    let n = spec.dim();
    if n > MAX_RECT_DIM {
        return Err(Error::Resource(format!("lattice enumeration supports n <= {MAX_RECT_DIM}, got {n}")));
    }
    let axes = spec.axes();
    let predicted = unit_ball_volume(n) / 2f64.powi(n as i32) * axes.iter().map(|a| a + 1.0).product::<f64>();
    if predicted > MAX_LATTICE_POINTS {
        return Err(Error::Resource(format!("predicted lattice count {predicted:.3e} exceeds {MAX_LATTICE_POINTS:e}")));
    }
    let ell = Ellipsoid::new(spec);
    let mut m = vec![0u64; n];
    Ok(enumerate(&ell, &axes, &mut m, 0))
}

fn enumerate(ell: &Ellipsoid, axes: &[f64], m: &mut [u64], axis: usize) -> u64 {
    let n = m.len();
    if axis + 1 == n {
        // Points along the last axis form a prefix 0..=k; find k directly.
        let mut k = (axes[axis].floor() as u64) + 1;
        loop {
            m[axis] = k;
            if ell.contains(m) {
                break;
            }
            if k == 0 {
                m[axis] = 0;
                return 0;
            }
            k -= 1;
        }
        m[axis] = 0;
        return k + 1;
    }
    let mut total = 0;
    let mut v = 0;
    loop {
        m[axis] = v;
        if !ell.contains(m) {
            break;
        }
        total += enumerate(ell, axes, m, axis + 1);
        v += 1;
    }
    m[axis] = 0;
    total
}

/// Closed form `3 + floor(sqrt(l^2 + 1))` for the `1 x l` rectangle.
pub fn rectangle_n_2d(ell: f64) -> Result<u64> {
    if !(ell >= 1.0 && ell.is_finite()) {
        return Err(Error::Parameter(format!("rectangle side ratio must be >= 1, got {ell}")));
    }
    Ok(3 + (ell * ell + 1.0).sqrt().floor() as u64)
}

/// `|dR|^n / |R|^(n-1)` with `|dR| = 2 sum_i prod_{j != i} l_j`.
pub fn rectangle_i(spec: &RectangleSpec) -> f64 {
    let l = &spec.lengths;
    let n = l.len();
    let volume: f64 = l.iter().product();
    let boundary: f64 = 2.0
        * (0..n)
            .map(|i| l.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, v)| v).product::<f64>())
            .sum::<f64>();
    boundary.powi(n as i32) / volume.powi(n as i32 - 1)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SandwichCheck {
    pub n_count: u64,
    pub isoperimetric: f64,
    /// `omega_n / 2^n * prod a_i <= N` and `omega_n / (4^n n^(n/2)) I <= N`.
    pub lower_ok: bool,
    /// `N <= omega_n prod a_i` and `N <= omega_n / 2^n I`.
    pub upper_ok: bool,
    /// `N / (c I)` for the lower constant `omega_n / (4^n n^(n/2))`.
    pub ratio_lower: f64,
    /// `N / (c I)` for the upper constant `omega_n / 2^n`.
    pub ratio_upper: f64,
}

pub fn rectangle_sandwich_check(spec: &RectangleSpec) -> Result<SandwichCheck> {
    let n_count = rectangle_n_exact(spec)?;
    let n = spec.dim() as i32;
    let nn = n_count as f64;
    let omega = unit_ball_volume(spec.dim());
    let prod_a: f64 = spec.axes().iter().product();
    let i = rectangle_i(spec);
    let c_lo = omega / (4f64.powi(n) * (n as f64).powf(n as f64 / 2.0));
    let c_hi = omega / 2f64.powi(n);
    Ok(SandwichCheck {
        n_count,
        isoperimetric: i,
        lower_ok: c_hi * prod_a <= nn && c_lo * i <= nn,
        upper_ok: nn <= omega * prod_a && nn <= c_hi * i,
        ratio_lower: nn / (c_lo * i),
        ratio_upper: nn / (c_hi * i),
    })
}

fn check_ball_dim(n: u32) -> Result<()> {
    if !(2..=MAX_BALL_DIM).contains(&n) {
        return Err(Error::Parameter(format!("ball dimension must be in 2..={MAX_BALL_DIM}, got {n}")));
    }
    Ok(())
}

/// First Dirichlet eigenvalue of the unit ball, `j_(n/2-1,1)^2`.
pub fn ball_lambda1(n: u32) -> Result<f64> {
    check_ball_dim(n)?;
    Ok(bessel_zero_j(n as f64 / 2.0 - 1.0, 1)?.value.powi(2))
}

fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Dimension of the degree-`ell` spherical harmonics on `S^(n-1)`.
pub fn ball_multiplicity(n: u32, ell: u32) -> BigUint {
    let (n, l) = (n as u64, ell as u64);
    match ell {
        0 => BigUint::one(),
        1 => BigUint::from(n),
        _ => binomial(n + l - 1, n - 1) - binomial(n + l - 3, n - 1),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BallSpectrumEntry {
    pub n: u32,
    pub ell: u32,
    pub k: u32,
    pub mu: f64,
    pub multiplicity: BigUint,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BallCount {
    pub n: u32,
    pub lambda1: f64,
    pub count: BigUint,
    /// Positive Neumann eigenvalues at or below `lambda1`; the zero
    /// eigenvalue is included in `count` but not listed.
    pub entries: Vec<BallSpectrumEntry>,
}

/// Number of Neumann eigenvalues of the unit ball in `R^n` at or below its
/// first Dirichlet eigenvalue, with multiplicity.
pub fn ball_n(n: u32) -> Result<BallCount> {
    let lambda1 = ball_lambda1(n)?;
    let nu = n as f64 / 2.0;
    let mut entries = Vec::new();
    let mut count = BigUint::one();
    for ell in 1.. {
        // The lower bound grows with ell, so no later degree contributes.
        if lorch_szego_bounds(nu, ell).0 > lambda1 {
            break;
        }
        for k in 1.. {
            let p = bessel_zero_p(nu, ell, k)?.value;
            let mu = p * p;
            if mu > lambda1 {
                break;
            }
            let multiplicity = ball_multiplicity(n, ell);
            count += &multiplicity;
            entries.push(BallSpectrumEntry {
                n,
                ell,
                k,
                mu,
                multiplicity,
            });
        }
    }
    Ok(BallCount {
        n,
        lambda1,
        count,
        entries,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct GrowthCheck {
    pub ell: u32,
    /// Smallest `n` in range with `N(B^n) >= n^ell`.
    pub first: Option<u32>,
    /// Smallest `n0` such that the bound holds for every `n0 <= n <= cap`.
    pub threshold: Option<u32>,
    pub cap: u32,
    /// `(n, N(B^n))` for every `n` scanned.
    pub counts: Vec<(u32, BigUint)>,
}

/// Scans `n = 2..=cap` for dimensions where `N(B^n) >= n^ell`.
pub fn ball_growth_check(ell: u32, cap: u32) -> Result<GrowthCheck> {
    if ell == 0 {
        return Err(Error::Parameter("growth exponent must be >= 1".into()));
    }
    check_ball_dim(cap)?;
    let counts: Vec<(u32, BigUint)> = (2..=cap).map(|n| ball_n(n).map(|b| (n, b.count))).collect::<Result<_>>()?;
    let holds = |(n, c): &(u32, BigUint)| *c >= BigUint::from(*n).pow(ell);
    let first = counts.iter().find(|c| holds(c)).map(|c| c.0);
    let threshold = match counts.iter().rposition(|c| !holds(c)) {
        None => Some(2),
        Some(i) if i + 1 < counts.len() => Some(counts[i + 1].0),
        Some(_) => None,
    };
    Ok(GrowthCheck {
        ell,
        first,
        threshold,
        cap,
        counts,
    })
}

/// `I(B^n) = n^n omega_n`, evaluated in logarithms.
pub fn ball_isoperimetric(n: u32) -> f64 {
    let nf = n as f64;
    let h = nf / 2.0;
    (nf * nf.ln() + h * std::f64::consts::PI.ln() - ln_gamma(h + 1.0)).exp()
}

/// First zeros of the ultraspherical derivative for degrees 1..3, and the
/// first zero of `J_(n/2-1)`, for one dimension `n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZeroRow {
    pub n: u32,
    pub p: [f64; 3],
    pub j: f64,
}

/// Rows for `n = 2..=7`.
pub fn table1() -> Result<Vec<ZeroRow>> {
    (2..=7u32)
        .map(|n| {
            let nu = n as f64 / 2.0;
            let p = |ell| bessel_zero_p(nu, ell, 1).map(|r| r.value);
            Ok(ZeroRow {
                n,
                p: [p(1)?, p(2)?, p(3)?],
                j: bessel_zero_j(nu - 1.0, 1)?.value,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    const TABLE1: [[f64; 4]; 6] = [
        [1.84, 3.05, 4.42, 2.40],
        [2.08, 3.34, 4.51, 3.14],
        [2.30, 3.61, 4.81, 3.83],
        [2.52, 3.86, 5.09, 4.49],
        [2.69, 4.10, 5.37, 5.14],
        [2.86, 4.33, 5.63, 5.76],
    ];

    // First zeros computed independently (SciPy brentq on jv/jvp).
    const REFERENCE: [[f64; 4]; 6] = [
        [1.8412, 3.0542, 4.2012, 2.4048],
        [2.0816, 3.3421, 4.5141, 3.1416],
        [2.2999, 3.6113, 4.8113, 3.8317],
        [2.5011, 3.8647, 5.0946, 4.4934],
        [2.6886, 4.1047, 5.3657, 5.1356],
        [2.8647, 4.3330, 5.6257, 5.7635],
    ];

    #[test]
    fn zero_table_matches_reference() {
        for (row, want) in table1().unwrap().iter().zip(REFERENCE) {
            let got = [row.p[0], row.p[1], row.p[2], row.j];
            for (g, w) in got.iter().zip(want) {
                assert!((g - w).abs() < 6e-5, "n={}: {g} vs {w}", row.n);
            }
        }
    }

    #[test]
    fn zero_table_against_published_two_decimals() {
        // Two published entries disagree with the reference values above:
        // (n=2, l=3) is printed as 4.42 and (n=5, l=1) as 2.52.
        let mut off = Vec::new();
        for (row, want) in table1().unwrap().iter().zip(TABLE1) {
            let got = [row.p[0], row.p[1], row.p[2], row.j];
            for (c, (g, w)) in got.iter().zip(want).enumerate() {
                if (g - w).abs() > 0.005 {
                    off.push((row.n, c));
                }
            }
        }
        assert_eq!(off, vec![(2, 2), (5, 0)]);
    }

    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn spec(l: &[f64]) -> RectangleSpec {
        RectangleSpec::new(l).unwrap()
    }

    fn brute_force(l: &[f64]) -> u64 {
        // Integer-scaled check for small integer lengths.
        let lcm: u64 = l.iter().map(|&v| v as u64).product();
        let w: Vec<u64> = l.iter().map(|&v| (lcm / v as u64).pow(2)).collect();
        let r: u64 = w.iter().sum();
        let max: Vec<u64> = l.iter().map(|&v| 2 * v as u64 + 2).collect();
        let mut count = 0;
        let mut m = vec![0u64; l.len()];
        loop {
            if m.iter().zip(&w).map(|(a, b)| a * a * b).sum::<u64>() <= r {
                count += 1;
            }
            let mut i = 0;
            loop {
                if i == m.len() {
                    return count;
                }
                m[i] += 1;
                if m[i] <= max[i] {
                    break;
                }
                m[i] = 0;
                i += 1;
            }
        }
    }

    #[test]
    fn lattice_counts() {
        assert_eq!(rectangle_n_exact(&spec(&[1.0, 1.0])).unwrap(), 4);
        assert_eq!(rectangle_n_exact(&spec(&[1.0, 3.0])).unwrap(), 6);
        assert_eq!(rectangle_n_exact(&spec(&[1.0, 1.0, 1.0])).unwrap(), 8);
        for l in [[1.0, 2.0, 3.0], [2.0, 2.0, 5.0], [1.0, 4.0, 4.0]] {
            assert_eq!(rectangle_n_exact(&spec(&l)).unwrap(), brute_force(&l), "{l:?}");
        }
        assert_eq!(rectangle_n_exact(&spec(&[1.0, 2.0, 1.0, 3.0])).unwrap(), brute_force(&[1.0, 2.0, 1.0, 3.0]));
        assert_eq!(rectangle_n_exact(&spec(&[7.0])).unwrap(), 2);
    }

    #[test]
    fn boundary_points_decided_exactly() {
        // l = sqrt(3): (0, 2) lies on the boundary since 4/3 = 1 + 1/3.
        let s = RectangleSpec::from_decimal(&["1", "1.7320508075688772"]).unwrap();
        assert_eq!(rectangle_n_exact(&s).unwrap(), rectangle_n_2d(3f64.sqrt()).unwrap());
        // l = 0.1 is not a double; exact decimal keeps (0, 1) and (1, 0) etc.
        let a = RectangleSpec::from_decimal(&["0.1", "0.1"]).unwrap();
        assert_eq!(rectangle_n_exact(&a).unwrap(), 4);
        let b = RectangleSpec::from_decimal(&["0.3", "0.4"]).unwrap();
        let c = RectangleSpec::from_decimal(&["3", "4"]).unwrap();
        assert_eq!(rectangle_n_exact(&b).unwrap(), rectangle_n_exact(&c).unwrap());
    }

    #[test]
    fn decimal_parsing() {
        let r = |s| parse_decimal(s).unwrap();
        assert_eq!(r("1.5"), BigRational::new(3.into(), 2.into()));
        assert_eq!(r("2e-1"), BigRational::new(1.into(), 5.into()));
        assert_eq!(r("-.25"), BigRational::new((-1).into(), 4.into()));
        assert_eq!(r("12"), BigRational::from_integer(12.into()));
        assert!(parse_decimal("1.2.3").is_err());
        assert!(parse_decimal("").is_err());
        assert!(RectangleSpec::from_decimal(&["0"]).is_err());
    }

    #[test]
    fn enumeration_cap() {
        assert!(matches!(rectangle_n_exact(&spec(&[1.0; 9])), Err(Error::Resource(_))));
        assert!(matches!(rectangle_n_exact(&spec(&[0.01, 100.0, 100.0, 100.0])), Err(Error::Resource(_))));
    }

    #[test]
    fn closed_form_2d() {
        assert_eq!(rectangle_n_2d(1.0).unwrap(), 4);
        assert_eq!(rectangle_n_2d(2.0).unwrap(), 5);
        assert!(rectangle_n_2d(0.5).is_err());
        for i in 0..200 {
            let ell = 1.0 + 49.0 * i as f64 / 199.0;
            assert_eq!(rectangle_n_2d(ell).unwrap(), rectangle_n_exact(&spec(&[1.0, ell])).unwrap(), "l={ell}");
        }
        let mut ell = 1.0;
        while ell <= 50.0 {
            assert_eq!(rectangle_n_2d(ell).unwrap(), rectangle_n_exact(&spec(&[1.0, ell])).unwrap());
            ell += 0.5;
        }
    }

    #[test]
    fn slope_at_fifty() {
        let s = spec(&[1.0, 50.0]);
        let n = rectangle_n_exact(&s).unwrap();
        let i = rectangle_i(&s);
        assert_eq!(n, 53);
        assert!((i - 208.08).abs() < 1e-9);
        assert!((0.24..=0.27).contains(&(n as f64 / i)));
    }

    #[test]
    fn box_isoperimetric() {
        for ell in [1.0, 2.0, 3.7] {
            let want = 4.0 * (1.0 + ell) * (1.0 + ell) / ell;
            assert!((rectangle_i(&spec(&[1.0, ell])) - want).abs() < 1e-12 * want);
        }
        assert!((rectangle_i(&spec(&[1.0, 1.0, 1.0])) - 216.0).abs() < 1e-9);
        assert!((rectangle_i(&spec(&[1.0, 2.0, 3.0])) - 22f64.powi(3) / 36.0).abs() < 1e-9);
    }

    #[test]
    fn sandwich_simple() {
        for l in [[1.0, 1.0], [1.0, 10.0]] {
            let c = rectangle_sandwich_check(&spec(&l)).unwrap();
            assert!(c.lower_ok && c.upper_ok, "{l:?}: {c:?}");
        }
    }

    #[test]
    fn ball_eigenvalues() {
        assert!((ball_lambda1(2).unwrap() - 2.404825557695773f64.powi(2)).abs() < 1e-9);
        assert!((ball_lambda1(3).unwrap() - PI * PI).abs() < 1e-9);
        assert!((ball_lambda1(7).unwrap().sqrt() - 5.76).abs() < 0.005);
        assert!(ball_lambda1(1).is_err());
        assert!(ball_lambda1(65).is_err());
    }

    #[test]
    fn multiplicities() {
        assert_eq!(ball_multiplicity(4, 2), BigUint::from(9u32));
        for n in 2..20 {
            assert_eq!(ball_multiplicity(n, 1), BigUint::from(n));
            assert_eq!(ball_multiplicity(n, 0), BigUint::one());
            assert_eq!(ball_multiplicity(n, 2), BigUint::from(n * (n + 1) / 2 - 1));
        }
        for l in 1..10 {
            assert_eq!(ball_multiplicity(2, l), BigUint::from(2u32));
        }
        // Beyond 64 bits.
        assert!(ball_multiplicity(64, 40).bits() > 64);
    }

    #[test]
    fn ball_counts() {
        let c = |n| ball_n(n).unwrap().count;
        assert_eq!(c(2), BigUint::from(3u32));
        assert_eq!(c(3), BigUint::from(4u32));
        assert!(c(4) >= BigUint::from(14u32));
        for n in 4..=12 {
            assert!(c(n) > BigUint::from(n + 1), "n={n}");
        }
        let b = ball_n(5).unwrap();
        assert!(b.entries.iter().all(|e| e.mu > 0.0 && e.mu <= b.lambda1));
    }

    #[test]
    fn table_ordering() {
        for n in 2..=7u32 {
            let nu = n as f64 / 2.0;
            let p2 = bessel_zero_p(nu, 2, 1).unwrap().value;
            let j = bessel_zero_j(nu - 1.0, 1).unwrap().value;
            assert_eq!(p2 < j, n >= 4, "n={n}");
        }
    }

    #[test]
    fn growth_scan() {
        let g = ball_growth_check(1, 12).unwrap();
        assert_eq!(g.first, Some(2));
        let t = g.threshold.unwrap();
        for (n, count) in &g.counts {
            if *n >= t {
                assert!(*count >= BigUint::from(*n));
            }
        }
        assert!(ball_growth_check(0, 10).is_err());
    }

    #[test]
    fn ball_ratio() {
        assert!((ball_isoperimetric(2) - 4.0 * PI).abs() < 1e-10);
        assert!((ball_isoperimetric(3) - 36.0 * PI).abs() < 1e-9);
        let r = ball_isoperimetric(21) / ball_isoperimetric(20);
        // Growth like C n^((n-1)/2) means the ratio itself grows like sqrt(n).
        let model = 21f64.powf(10.0) / 20f64.powf(9.5);
        assert!(r / model > 0.1 && r / model < 10.0, "{r} vs {model}");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(50))]
        #[test]
        fn sandwich_2d(l in proptest::collection::vec(0.2f64..20.0, 2)) {
            let c = rectangle_sandwich_check(&spec(&l)).unwrap();
            prop_assert!(c.lower_ok && c.upper_ok, "{:?}", c);
        }

        #[test]
        fn sandwich_3d(l in proptest::collection::vec(0.2f64..20.0, 3)) {
            let c = rectangle_sandwich_check(&spec(&l)).unwrap();
            prop_assert!(c.lower_ok && c.upper_ok, "{:?}", c);
        }

        #[test]
        fn sandwich_4d(l in proptest::collection::vec(0.2f64..20.0, 4)) {
            let c = rectangle_sandwich_check(&spec(&l)).unwrap();
            prop_assert!(c.lower_ok && c.upper_ok, "{:?}", c);
        }

        #[test]
        fn count_invariant_under_scaling(l in proptest::collection::vec(0.5f64..5.0, 2..4), c in 0.1f64..10.0) {
            let scaled: Vec<f64> = l.iter().map(|v| v * c).collect();
            prop_assert_eq!(rectangle_n_exact(&spec(&l)).unwrap(), rectangle_n_exact(&spec(&scaled)).unwrap());
        }
    }
}
