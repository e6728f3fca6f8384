//! Sparse LDLᵀ with static diagonal pivots on a nested-dissection ordering.
//!
//! The symbolic analysis (ordering, elimination tree, column counts) depends
//! only on the sparsity pattern shared by K and M, so it is done once per
//! operator pair and reused for every shift.

use super::ordering::nested_dissection;
use crate::error::{Error, Result};
use crate::fem::{OperatorPair, SparseSym};

/// Relative pivot size below which a shift is treated as an eigenvalue.
pub const ZERO_PIVOT_REL: f64 = 1e-14;

pub struct Symbolic {
    n: usize,
    /// `perm[new] = old`.
    perm: Vec<usize>,
    /// For permuted column `k`: `(row, value index)` for rows `<= k`.
    upper: Vec<Vec<(usize, usize)>>,
    parent: Vec<usize>,
    lp: Vec<usize>,
}

pub struct Factor {
    n: usize,
    perm: Vec<usize>,
    lp: Vec<usize>,
    li: Vec<usize>,
    lx: Vec<f64>,
    d: Vec<f64>,
}

const NONE: usize = usize::MAX;

/// Value-array positions of each stored entry, row by row.
fn entry_positions(a: &SparseSym) -> Vec<Vec<(usize, usize)>> {
    let mut pos = 0;
    (0..a.n())
        .map(|i| {
            let (cols, _) = a.row(i);
            cols.iter()
                .map(|&j| {
                    pos += 1;
                    (j, pos - 1)
                })
                .collect()
        })
        .collect()
}

impl Symbolic {
    pub fn analyze(a: &SparseSym) -> Self {
        let n = a.n();
        let adj: Vec<Vec<usize>> = (0..n)
            .map(|i| a.row(i).0.iter().copied().filter(|&j| j != i).collect())
            .collect();
        let perm = nested_dissection(&adj);
        let mut iperm = vec![0; n];
        for (new, &old) in perm.iter().enumerate() {
            iperm[old] = new;
        }
        let positions = entry_positions(a);
        let upper: Vec<Vec<(usize, usize)>> = (0..n)
            .map(|k| {
                let mut col: Vec<(usize, usize)> = positions[perm[k]]
                    .iter()
                    .map(|&(j, p)| (iperm[j], p))
                    .filter(|&(i, _)| i <= k)
                    .collect();
                col.sort_unstable();
                col
            })
            .collect();

        let mut parent = vec![NONE; n];
        let mut flag = vec![NONE; n];
        let mut lnz = vec![0usize; n];
        for k in 0..n {
            flag[k] = k;
            for &(i0, _) in &upper[k] {
                let mut i = i0;
                while i != k && flag[i] != k {
                    if parent[i] == NONE {
                        parent[i] = k;
                    }
                    lnz[i] += 1;
                    flag[i] = k;
                    i = parent[i];
                }
            }
        }
        let mut lp = vec![0; n + 1];
        for k in 0..n {
            lp[k + 1] = lp[k] + lnz[k];
        }
        Self {
            n,
            perm,
            upper,
            parent,
            lp,
        }
    }

    pub fn nnz_l(&self) -> usize {
        self.lp[self.n]
    }

    /// Factors the matrix whose stored values (in the analysed pattern's
    /// order) are `vals`. `scale` sets the zero-pivot threshold.
    pub fn factor(&self, vals: &[f64], scale: f64, shift: f64) -> Result<Factor> {
        let n = self.n;
        let nnz = self.nnz_l();
        let mut li = vec![0usize; nnz];
        let mut lx = vec![0.0; nnz];
        let mut d = vec![0.0; n];
        let mut y = vec![0.0; n];
        let mut pattern = vec![0usize; n];
        let mut flag = vec![NONE; n];
        let mut lnz = vec![0usize; n];
        let tol = ZERO_PIVOT_REL * scale;
        for k in 0..n {
            let mut top = n;
            flag[k] = k;
            for &(i0, p) in &self.upper[k] {
                y[i0] += vals[p];
                let mut len = 0;
                let mut i = i0;
                while flag[i] != k {
                    pattern[len] = i;
                    len += 1;
                    flag[i] = k;
                    i = self.parent[i];
                }
                while len > 0 {
                    top -= 1;
                    len -= 1;
                    pattern[top] = pattern[len];
                }
            }
            d[k] = y[k];
            y[k] = 0.0;
            while top < n {
                let i = pattern[top];
                top += 1;
                let yi = y[i];
                y[i] = 0.0;
                let p2 = self.lp[i] + lnz[i];
                for p in self.lp[i]..p2 {
                    y[li[p]] -= lx[p] * yi;
                }
                let l_ki = yi / d[i];
                d[k] -= l_ki * yi;
                li[p2] = k;
                lx[p2] = l_ki;
                lnz[i] += 1;
            }
            if !(d[k].abs() >= tol) {
                return Err(Error::ShiftOnEigenvalue {
                    shift,
                    pivot: d[k],
                    row: self.perm[k],
                });
            }
        }
        Ok(Factor {
            n,
            perm: self.perm.clone(),
            lp: self.lp.clone(),
            li,
            lx,
            d,
        })
    }
}

impl Factor {
    pub fn negative_pivots(&self) -> usize {
        self.d.iter().filter(|&&v| v < 0.0).count()
    }

    pub fn min_abs_pivot(&self) -> f64 {
        self.d.iter().fold(f64::INFINITY, |m, v| m.min(v.abs()))
    }

    /// Solves `A x = b`.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut x: Vec<f64> = (0..n).map(|k| b[self.perm[k]]).collect();
        for k in 0..n {
            let xk = x[k];
            for p in self.lp[k]..self.lp[k + 1] {
                x[self.li[p]] -= self.lx[p] * xk;
            }
        }
        for k in 0..n {
            x[k] /= self.d[k];
        }
        for k in (0..n).rev() {
            let mut s = x[k];
            for p in self.lp[k]..self.lp[k + 1] {
                s -= self.lx[p] * x[self.li[p]];
            }
            x[k] = s;
        }
        let mut out = vec![0.0; n];
        for k in 0..n {
            out[self.perm[k]] = x[k];
        }
        out
    }
}

/// Shift-and-factor helper for `K - sigma M` on a fixed pair.
pub struct ShiftedFactorizer<'a> {
    pair: &'a OperatorPair,
    symbolic: Symbolic,
    k_scale: f64,
    m_scale: f64,
}

impl<'a> ShiftedFactorizer<'a> {
    pub fn new(pair: &'a OperatorPair) -> Self {
        let same_pattern = (0..pair.k.n()).all(|i| pair.k.row(i).0 == pair.m.row(i).0);
        assert!(same_pattern, "K and M must share a sparsity pattern");
        let k_scale = pair.k.diag().iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let m_scale = pair.m.diag().iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        Self {
            pair,
            symbolic: Symbolic::analyze(&pair.k),
            k_scale,
            m_scale,
        }
    }

    pub fn pair(&self) -> &OperatorPair {
        self.pair
    }

    pub fn factor(&self, sigma: f64) -> Result<Factor> {
        let vals: Vec<f64> = (0..self.pair.k.n())
            .flat_map(|i| {
                let (_, kv) = self.pair.k.row(i);
                let (_, mv) = self.pair.m.row(i);
                kv.iter().zip(mv).map(|(&k, &m)| k - sigma * m).collect::<Vec<_>>()
            })
            .collect();
        let scale = self.k_scale + sigma.abs() * self.m_scale;
        self.symbolic.factor(&vals, scale, sigma)
    }
}
