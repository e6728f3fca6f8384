//! Dense reference path: Bunch–Kaufman inertia and a full generalized
//! eigensolve.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::fem::SparseSym;

/// Bunch–Kaufman growth parameter (1 + sqrt(17)) / 8.
const ALPHA: f64 = 0.640_388_203_202_208_4;

/// Counts of negative, zero and positive eigenvalues from a block-diagonal
/// factorization; `min_abs` is the smallest pivot magnitude seen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Inertia {
    pub negative: usize,
    pub zero: usize,
    pub positive: usize,
    pub min_abs: f64,
}

/// Inertia of the symmetric matrix `a` (row-major, overwritten) by symmetric
/// indefinite factorization with 1x1 / 2x2 Bunch–Kaufman pivoting. Pivots
/// below `zero_tol` in magnitude count as zero.
pub fn bunch_kaufman_inertia(a: &mut [Vec<f64>], zero_tol: f64) -> Inertia {
    let n = a.len();
    let mut out = Inertia {
        negative: 0,
        zero: 0,
        positive: 0,
        min_abs: f64::INFINITY,
    };
    let tally = |v: f64, out: &mut Inertia| {
        out.min_abs = out.min_abs.min(v.abs());
        if v.abs() <= zero_tol {
            out.zero += 1;
        } else if v < 0.0 {
            out.negative += 1;
        } else {
            out.positive += 1;
        }
    };
    let swap = |a: &mut [Vec<f64>], p: usize, q: usize| {
        if p != q {
            a.swap(p, q);
            for row in a.iter_mut() {
                row.swap(p, q);
            }
        }
    };

    let mut k = 0;
    while k < n {
        let absakk = a[k][k].abs();
        let (imax, colmax) = ((k + 1)..n)
            .map(|i| (i, a[i][k].abs()))
            .fold((k, 0.0), |best, c| if c.1 > best.1 { c } else { best });

        let (kp, kstep) = if absakk.max(colmax) == 0.0 {
            (k, 1)
        } else if absakk >= ALPHA * colmax {
            (k, 1)
        } else {
            let rowmax = (k..n)
                .filter(|&j| j != imax)
                .map(|j| a[imax][j].abs())
                .fold(0.0, f64::max);
            if absakk * rowmax >= ALPHA * colmax * colmax {
                (k, 1)
            } else if a[imax][imax].abs() >= ALPHA * rowmax {
                (imax, 1)
            } else {
                (imax, 2)
            }
        };

        let kk = k + kstep - 1;
        swap(a, kk, kp);

        if kstep == 1 {
            let d = a[k][k];
            tally(d, &mut out);
            if d != 0.0 {
                for i in (k + 1)..n {
                    let f = a[i][k] / d;
                    if f == 0.0 {
                        continue;
                    }
                    for j in (k + 1)..n {
                        a[i][j] -= f * a[k][j];
                    }
                }
            }
        } else {
            let (p, q, r) = (a[k][k], a[k + 1][k], a[k + 1][k + 1]);
            let det = p * r - q * q;
            // Eigenvalues of the 2x2 pivot block.
            let mean = 0.5 * (p + r);
            let rad = (0.25 * (p - r) * (p - r) + q * q).sqrt();
            tally(mean - rad, &mut out);
            tally(mean + rad, &mut out);
            for i in (k + 2)..n {
                let (u, v) = (a[i][k], a[i][k + 1]);
                // [w1, w2] = D^{-1} [u, v]
                let w1 = (r * u - q * v) / det;
                let w2 = (p * v - q * u) / det;
                for j in (k + 2)..n {
                    a[i][j] -= w1 * a[k][j] + w2 * a[k + 1][j];
                }
            }
        }
        k += kstep;
    }
    out
}

/// Number of eigenvalues of `K - tau M` below zero, with the shift-on-
/// eigenvalue error when a pivot is tiny relative to `scale`.
pub fn count_below_dense(k: &SparseSym, m: &SparseSym, tau: f64, scale: f64) -> Result<Inertia> {
    let mut a = k.axpby(1.0, m, -tau).to_dense();
    let inertia = bunch_kaufman_inertia(&mut a, super::ldl::ZERO_PIVOT_REL * scale);
    if inertia.zero > 0 {
        return Err(Error::ShiftOnEigenvalue {
            shift: tau,
            pivot: inertia.min_abs,
            row: 0,
        });
    }
    Ok(inertia)
}

/// All generalized eigenvalues of `(K, M)`, ascending, by Cholesky reduction.
pub fn dense_generalized_eigenvalues(k: &SparseSym, m: &SparseSym) -> Result<Vec<f64>> {
    let n = k.n();
    let kd = DMatrix::from_fn(n, n, |i, j| k.get(i, j));
    let md = DMatrix::from_fn(n, n, |i, j| m.get(i, j));
    let chol = md.cholesky().ok_or(Error::NotPositiveDefinite { pivot: 0.0, row: 0 })?;
    let l = chol.l();
    let linv = l
        .clone()
        .try_inverse()
        .ok_or(Error::NotPositiveDefinite { pivot: 0.0, row: 0 })?;
    let c = &linv * kd * linv.transpose();
    let c = (&c + c.transpose()) * 0.5;
    let mut vals: Vec<f64> = SymmetricEigen::new(c).eigenvalues.iter().copied().collect();
    vals.sort_by(f64::total_cmp);
    Ok(vals)
}
