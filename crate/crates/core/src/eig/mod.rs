//! Generalized symmetric eigenvalues `K x = lambda M x`: inertia counts and
//! shift-invert subspace iteration.

pub mod dense;
pub mod ldl;
pub mod ordering;

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fem::OperatorPair;
pub use ldl::ShiftedFactorizer;

/// Pairs with at most this many dofs use the dense path.
pub const DENSE_LIMIT: usize = 500;

/// Target relative residual for returned eigenpairs.
pub const RESIDUAL_TOL: f64 = 1e-8;

/// Subspace iterations before giving up.
pub const MAX_ITERATIONS: usize = 500;

/// Shift perturbation retries on a zero pivot.
pub const SHIFT_RETRIES: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InertiaResult {
    /// Generalized eigenvalues strictly below `shift`.
    pub n_below: usize,
    pub shift: f64,
    pub pivot_min_abs: f64,
}

/// Eigenvalues with their relative residuals.
#[derive(Debug, Clone, Default)]
pub struct EigenEstimate {
    pub values: Vec<f64>,
    pub residuals: Vec<f64>,
}

/// Reusable solver state for one operator pair.
pub struct EigenSolver<'a> {
    pair: &'a OperatorPair,
    factorizer: Option<ShiftedFactorizer<'a>>,
    k_scale: f64,
    m_scale: f64,
    dense_limit: usize,
}

impl<'a> EigenSolver<'a> {
    pub fn new(pair: &'a OperatorPair) -> Self {
        let diag_max = |d: Vec<f64>| d.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        Self {
            pair,
            factorizer: None,
            k_scale: diag_max(pair.k.diag()),
            m_scale: diag_max(pair.m.diag()),
            dense_limit: DENSE_LIMIT,
        }
    }

    /// Overrides the size at or below which the dense path is used.
    pub fn with_dense_limit(mut self, n: usize) -> Self {
        self.dense_limit = n;
        self
    }

    pub fn pair(&self) -> &OperatorPair {
        self.pair
    }

    fn factorizer(&mut self) -> &ShiftedFactorizer<'a> {
        let pair = self.pair;
        self.factorizer.get_or_insert_with(|| ShiftedFactorizer::new(pair))
    }

    /// Single attempt: number of eigenvalues strictly below `tau` from the
    /// inertia of `K - tau M`.
    pub fn count_leq(&mut self, tau: f64) -> Result<InertiaResult> {
        if self.pair.n_dof() <= self.dense_limit {
            let scale = self.k_scale + tau.abs() * self.m_scale;
            let inertia = dense::count_below_dense(&self.pair.k, &self.pair.m, tau, scale)?;
            return Ok(InertiaResult {
                n_below: inertia.negative,
                shift: tau,
                pivot_min_abs: inertia.min_abs,
            });
        }
        let f = self.factorizer().factor(tau)?;
        Ok(InertiaResult {
            n_below: f.negative_pivots(),
            shift: tau,
            pivot_min_abs: f.min_abs_pivot(),
        })
    }

    /// [`Self::count_leq`] with the shift nudged upward by a factor
    /// `1 + 1e-10` after each zero pivot.
    pub fn count_leq_retry(&mut self, tau: f64) -> Result<InertiaResult> {
        let mut shift = tau;
        let mut last = None;
        for _ in 0..=SHIFT_RETRIES {
            match self.count_leq(shift) {
                Err(e @ Error::ShiftOnEigenvalue { .. }) => {
                    last = Some(e);
                    shift = if shift == 0.0 { 1e-12 * self.k_scale / self.m_scale } else { shift * (1.0 + 1e-10) };
                }
                other => return other,
            }
        }
        Err(last.expect("at least one attempt"))
    }

    fn factor_near(&mut self, sigma: f64) -> Result<(ldl::Factor, f64)> {
        let mut shift = sigma;
        let nudge = 1e-10 * (sigma.abs() + self.k_scale / self.m_scale);
        let mut last = None;
        for attempt in 0..=SHIFT_RETRIES {
            match self.factorizer().factor(shift) {
                Ok(f) => return Ok((f, shift)),
                Err(e) => {
                    last = Some(e);
                    shift = sigma + nudge * 10f64.powi(attempt as i32);
                }
            }
        }
        Err(last.expect("at least one attempt"))
    }

    /// The `want` eigenvalues closest to `sigma` by shift-invert subspace
    /// iteration with `guard` extra vectors.
    pub fn nearest(&mut self, sigma: f64, want: usize, guard: usize) -> Result<EigenEstimate> {
        // Clustered spectra converge slowly; widen the subspace and retry.
        let mut guard = guard;
        for _ in 0..2 {
            match self.nearest_once(sigma, want, guard) {
                Err(Error::NoConvergence { .. }) => guard = 2 * guard + 4,
                other => return other,
            }
        }
        self.nearest_once(sigma, want, guard)
    }

    fn nearest_once(&mut self, sigma: f64, want: usize, guard: usize) -> Result<EigenEstimate> {
        let n = self.pair.n_dof();
        if want == 0 {
            return Ok(EigenEstimate::default());
        }
        if want > n {
            return Err(Error::Parameter(format!("{want} eigenvalues requested from {n} dofs")));
        }
        let p = (want + guard).min(n);
        if n <= p.max(8).max(self.dense_limit) {
            let all = dense::dense_generalized_eigenvalues(&self.pair.k, &self.pair.m)?;
            let mut idx: Vec<usize> = (0..all.len()).collect();
            idx.sort_by(|&a, &b| (all[a] - sigma).abs().total_cmp(&(all[b] - sigma).abs()));
            let mut values: Vec<f64> = idx[..want].iter().map(|&i| all[i]).collect();
            values.sort_by(f64::total_cmp);
            return Ok(EigenEstimate {
                residuals: vec![0.0; values.len()],
                values,
            });
        }
        let (factor, shift) = self.factor_near(sigma)?;
        let pair = self.pair;
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        let mut x: Vec<Vec<f64>> = (0..p).map(|_| (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect();
        m_orthonormalize(pair, &mut x, &mut rng);

        let mut worst = f64::INFINITY;
        for _ in 0..MAX_ITERATIONS {
            let mut y: Vec<Vec<f64>> = x.iter().map(|v| factor.solve(&pair.m.mul(v))).collect();
            m_orthonormalize(pair, &mut y, &mut rng);
            let ky: Vec<Vec<f64>> = y.iter().map(|v| pair.k.mul(v)).collect();
            let kr = DMatrix::from_fn(p, p, |i, j| 0.5 * (dot(&y[i], &ky[j]) + dot(&y[j], &ky[i])));
            let eig = SymmetricEigen::new(kr);
            let mut order: Vec<usize> = (0..p).collect();
            order.sort_by(|&a, &b| {
                (eig.eigenvalues[a] - shift)
                    .abs()
                    .total_cmp(&(eig.eigenvalues[b] - shift).abs())
            });
            x = order
                .iter()
                .map(|&c| {
                    let mut v = vec![0.0; n];
                    for (i, yi) in y.iter().enumerate() {
                        let w = eig.eigenvectors[(i, c)];
                        v.iter_mut().zip(yi).for_each(|(a, b)| *a += w * b);
                    }
                    v
                })
                .collect();
            let theta: Vec<f64> = order.iter().map(|&c| eig.eigenvalues[c]).collect();
            let floor = 1e-6 * self.k_scale / self.m_scale;
            let residuals: Vec<f64> = (0..want)
                .map(|i| relative_residual(pair, &x[i], theta[i], floor))
                .collect();
            worst = residuals.iter().fold(0.0, |m: f64, &r| m.max(r));
            if worst <= RESIDUAL_TOL {
                let mut pairs: Vec<(f64, f64)> = theta[..want].iter().copied().zip(residuals).collect();
                pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
                return Ok(EigenEstimate {
                    values: pairs.iter().map(|p| p.0).collect(),
                    residuals: pairs.iter().map(|p| p.1).collect(),
                });
            }
        }
        Err(Error::NoConvergence {
            iterations: MAX_ITERATIONS,
            residual: worst,
        })
    }

    /// Smallest eigenvalue and its relative residual (Dirichlet pairs).
    pub fn smallest_eigenvalue(&mut self) -> Result<(f64, f64)> {
        let e = self.nearest(0.0, 1, 5)?;
        Ok((e.values[0], e.residuals[0]))
    }

    /// Eigenvalues below `tau` (at most `max_count`, the smallest ones).
    pub fn eigenvalues_below(&mut self, tau: f64, max_count: usize) -> Result<Vec<f64>> {
        let count = self.count_leq_retry(tau)?.n_below;
        let want = count.min(max_count);
        if want == 0 {
            return Ok(vec![]);
        }
        let guard = (want / 2).max(4);
        let sigma = if want == count {
            0.5 * tau
        } else {
            -0.01 * tau.abs().max(self.k_scale / self.m_scale * 1e-6)
        };
        Ok(self.nearest(sigma, want, guard)?.values)
    }

    /// Eigenvalues in `[lo, hi)` and the number below `lo`.
    pub fn eigenvalues_between(&mut self, lo: f64, hi: f64) -> Result<(usize, EigenEstimate)> {
        let below_lo = self.count_leq_retry(lo)?.n_below;
        let below_hi = self.count_leq_retry(hi)?.n_below;
        let want = below_hi.saturating_sub(below_lo);
        let guard = (want / 2).max(4);
        let est = self.nearest(0.5 * (lo + hi), want, guard)?;
        Ok((below_lo, est))
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// `||K x - theta M x|| / (max(|theta|, floor) ||M x||)`; the floor keeps
/// the measure meaningful for the zero Neumann mode.
pub fn relative_residual(pair: &OperatorPair, x: &[f64], theta: f64, floor: f64) -> f64 {
    let kx = pair.k.mul(x);
    let mx = pair.m.mul(x);
    let r: Vec<f64> = kx.iter().zip(&mx).map(|(a, b)| a - theta * b).collect();
    let denom = (theta.abs().max(floor) * norm(&mx)).max(f64::MIN_POSITIVE);
    norm(&r) / denom
}

/// Modified Gram–Schmidt in the M inner product, two passes; dependent
/// vectors are replaced by random ones.
fn m_orthonormalize(pair: &OperatorPair, v: &mut [Vec<f64>], rng: &mut ChaCha8Rng) {
    let n = pair.n_dof();
    let mut mv: Vec<Vec<f64>> = Vec::with_capacity(v.len());
    for i in 0..v.len() {
        for attempt in 0..3 {
            let before = {
                let m = pair.m.mul(&v[i]);
                dot(&v[i], &m).max(0.0).sqrt()
            };
            for _ in 0..2 {
                for j in 0..i {
                    let c = dot(&mv[j], &v[i]);
                    let (head, tail) = v.split_at_mut(i);
                    tail[0].iter_mut().zip(&head[j]).for_each(|(a, b)| *a -= c * b);
                }
            }
            let m = pair.m.mul(&v[i]);
            let nrm = dot(&v[i], &m).max(0.0).sqrt();
            if nrm > 1e-10 * before && nrm > 0.0 {
                v[i].iter_mut().for_each(|a| *a /= nrm);
                mv.push(m.into_iter().map(|a| a / nrm).collect());
                break;
            }
            assert!(attempt < 2, "could not extend the M-orthonormal basis");
            v[i] = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        }
    }
}

/// Convenience wrappers on a fresh solver.
pub fn smallest_eigenvalue(pair: &OperatorPair) -> Result<(f64, f64)> {
    EigenSolver::new(pair).smallest_eigenvalue()
}

pub fn count_leq(pair: &OperatorPair, tau: f64) -> Result<InertiaResult> {
    EigenSolver::new(pair).count_leq(tau)
}

pub fn eigenvalues_below(pair: &OperatorPair, tau: f64, max_count: usize) -> Result<Vec<f64>> {
    EigenSolver::new(pair).eigenvalues_below(tau, max_count)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::{assemble, BoundaryCondition, SparseSym};
    use crate::geom::{make_rectangle, make_waffle, PlanarDomain};
    use crate::mesh::triangulate;
    use std::f64::consts::PI;

    fn pair(d: &PlanarDomain, h: f64, bc: BoundaryCondition) -> OperatorPair {
        assemble(&triangulate(d, h).unwrap(), bc, 1).unwrap()
    }

    #[test]
    fn one_dof() {
        let p = OperatorPair {
            k: SparseSym::from_dense(&[vec![2.0]]),
            m: SparseSym::from_dense(&[vec![1.0]]),
            bc: BoundaryCondition::Dirichlet,
        };
        assert_eq!(smallest_eigenvalue(&p).unwrap().0, 2.0);
        assert_eq!(count_leq(&p, 3.0).unwrap().n_below, 1);
        assert!(matches!(count_leq(&p, 2.0), Err(Error::ShiftOnEigenvalue { .. })));
    }

    #[test]
    fn unit_square_neumann_counts() {
        let sq = make_rectangle(1.0).unwrap();
        let p = pair(&sq, 0.05, BoundaryCondition::Neumann);
        assert!(p.n_dof() > DENSE_LIMIT);
        let mut s = EigenSolver::new(&p);
        assert_eq!(s.count_leq(1.0).unwrap().n_below, 1);
        assert_eq!(s.count_leq(2.0 * PI * PI * 1.01).unwrap().n_below, 4);
        // At the discrete Dirichlet threshold the (1,1) Neumann mode ties.
        let d = pair(&sq, 0.05, BoundaryCondition::Dirichlet);
        let (lam_h, _) = smallest_eigenvalue(&d).unwrap();
        assert_eq!(s.count_leq(lam_h * (1.0 + 1e-8)).unwrap().n_below, 4);
        let eps = 1e-9 * p.k.max_abs();
        assert_eq!(s.count_leq(eps).unwrap().n_below, 1);
        let v = s.eigenvalues_below(25.0, 10).unwrap();
        assert_eq!(v.len(), 4);
        let exact = [0.0, PI * PI, PI * PI, 2.0 * PI * PI];
        for (a, b) in v.iter().zip(exact) {
            assert!((a - b).abs() < 0.01 * b.max(1.0), "{v:?}");
        }
    }

    #[test]
    fn dirichlet_counts_and_smallest() {
        let sq = make_rectangle(1.0).unwrap();
        let p = pair(&sq, 0.05, BoundaryCondition::Dirichlet);
        let mut s = EigenSolver::new(&p);
        assert_eq!(s.count_leq(0.0).unwrap().n_below, 0);
        let (l1, res) = s.smallest_eigenvalue().unwrap();
        assert!(res <= RESIDUAL_TOL);
        assert!(l1 > 2.0 * PI * PI && l1 < 2.0 * PI * PI * 1.01);
        assert_eq!(s.eigenvalues_below(20.0, 10).unwrap().len(), 1);
        assert!(s.eigenvalues_below(1.0, 10).unwrap().is_empty());
        // 2x1 rectangle: 5 pi^2 / 4.
        let r = pair(&make_rectangle(2.0).unwrap(), 0.05, BoundaryCondition::Dirichlet);
        let (l, _) = smallest_eigenvalue(&r).unwrap();
        assert!((l / (1.25 * PI * PI) - 1.0).abs() < 0.01);
    }

    #[test]
    fn sparse_matches_dense_oracle() {
        for (d, h) in [
            (make_rectangle(1.0).unwrap(), 0.06),
            (make_rectangle(2.5).unwrap(), 0.12),
            (make_waffle(2).unwrap(), 0.35),
        ] {
            for bc in [BoundaryCondition::Neumann, BoundaryCondition::Dirichlet] {
                let p = pair(&d, h, bc);
                assert!(p.n_dof() <= 1000);
                let all = dense::dense_generalized_eigenvalues(&p.k, &p.m).unwrap();
                let f = ShiftedFactorizer::new(&p);
                for t in [0.5, 3.0, 10.0, 25.0, 60.0, 140.0] {
                    let expect = all.iter().filter(|&&e| e < t).count();
                    let got = f.factor(t).unwrap().negative_pivots();
                    assert_eq!(got, expect, "{} {bc:?} tau {t}", d.label());
                }
                let mut s = EigenSolver::new(&p).with_dense_limit(0);
                let below = s
                    .eigenvalues_below(40.0, 100)
                    .unwrap_or_else(|e| panic!("{} {bc:?}: {e}", d.label()));
                let expect: Vec<f64> = all.iter().copied().filter(|&e| e < 40.0).collect();
                assert_eq!(below.len(), expect.len());
                for (a, b) in below.iter().zip(&expect) {
                    assert!((a - b).abs() <= 1e-8 * b.abs().max(1.0), "{a} vs {b}");
                }
            }
        }
    }

    #[test]
    fn dense_path_matches_oracle() {
        let p = pair(&make_rectangle(1.5).unwrap(), 0.15, BoundaryCondition::Neumann);
        assert!(p.n_dof() <= DENSE_LIMIT);
        let all = dense::dense_generalized_eigenvalues(&p.k, &p.m).unwrap();
        let mut s = EigenSolver::new(&p);
        let mut prev = 0;
        for t in [1.0, 5.0, 10.0, 20.0, 40.0, 80.0] {
            let c = s.count_leq(t).unwrap().n_below;
            assert_eq!(c, all.iter().filter(|&&e| e < t).count());
            assert!(c >= prev);
            prev = c;
        }
    }

    #[test]
    fn window_extraction() {
        let p = pair(&make_rectangle(1.0).unwrap(), 0.04, BoundaryCondition::Neumann);
        let mut s = EigenSolver::new(&p);
        let lam = 2.0 * PI * PI;
        let (below, est) = s.eigenvalues_between(0.9 * lam, 1.1 * lam).unwrap();
        assert_eq!(below, 3);
        assert_eq!(est.values.len(), 1);
        assert!((est.values[0] / lam - 1.0).abs() < 0.01);
    }
}
