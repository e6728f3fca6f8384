//! Compressed-row symmetric matrices with both triangles stored.

use std::fmt::Write as _;

#[derive(Debug, Clone, PartialEq)]
pub struct SparseSym {
    n: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    vals: Vec<f64>,
}

impl SparseSym {
    /// Builds from `(row, col, value)` triplets, summing duplicates in input
    /// order so the result is bitwise reproducible. Both `(i, j)` and `(j, i)`
    /// must be supplied for off-diagonal entries.
    pub fn from_triplets(n: usize, mut triplets: Vec<(usize, usize, f64)>) -> Self {
        // Stable sort keeps the summation order of duplicates fixed.
        triplets.sort_by_key(|&(i, j, _)| (i, j));
        let mut row_ptr = vec![0; n + 1];
        let mut col_idx = Vec::with_capacity(triplets.len());
        let mut vals: Vec<f64> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        for (i, j, v) in triplets {
            assert!(i < n && j < n, "triplet ({i}, {j}) out of range for n={n}");
            if last == Some((i, j)) {
                *vals.last_mut().expect("entry exists") += v;
            } else {
                col_idx.push(j);
                vals.push(v);
                row_ptr[i + 1] += 1;
                last = Some((i, j));
            }
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        Self {
            n,
            row_ptr,
            col_idx,
            vals,
        }
    }

    pub fn from_dense(a: &[Vec<f64>]) -> Self {
        let n = a.len();
        let mut t = Vec::new();
        for (i, row) in a.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                if v != 0.0 || i == j {
                    t.push((i, j, v));
                }
            }
        }
        Self::from_triplets(n, t)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    /// `(columns, values)` of row `i`, columns ascending.
    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        (&self.col_idx[r.clone()], &self.vals[r])
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (cols, vals) = self.row(i);
        cols.binary_search(&j).map(|k| vals[k]).unwrap_or(0.0)
    }

    pub fn diag(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            let (cols, vals) = self.row(i);
            *yi = cols.iter().zip(vals).map(|(&j, &v)| v * x[j]).sum();
        }
    }

    pub fn mul(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        self.matvec(x, &mut y);
        y
    }

    /// `a * self + b * other` over the union pattern.
    pub fn axpby(&self, a: f64, other: &SparseSym, b: f64) -> SparseSym {
        assert_eq!(self.n, other.n);
        let mut row_ptr = vec![0; self.n + 1];
        let mut col_idx = Vec::with_capacity(self.nnz().max(other.nnz()));
        let mut vals = Vec::with_capacity(col_idx.capacity());
        for i in 0..self.n {
            let (c1, v1) = self.row(i);
            let (c2, v2) = other.row(i);
            let (mut p, mut q) = (0, 0);
            while p < c1.len() || q < c2.len() {
                let j1 = c1.get(p).copied().unwrap_or(usize::MAX);
                let j2 = c2.get(q).copied().unwrap_or(usize::MAX);
                if j1 == j2 {
                    col_idx.push(j1);
                    vals.push(a * v1[p] + b * v2[q]);
                    p += 1;
                    q += 1;
                } else if j1 < j2 {
                    col_idx.push(j1);
                    vals.push(a * v1[p]);
                    p += 1;
                } else {
                    col_idx.push(j2);
                    vals.push(b * v2[q]);
                    q += 1;
                }
            }
            row_ptr[i + 1] = col_idx.len();
        }
        SparseSym {
            n: self.n,
            row_ptr,
            col_idx,
            vals,
        }
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.vals.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Largest `|a_ij - a_ji|`.
    pub fn asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.n {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                worst = worst.max((v - self.get(j, i)).abs());
            }
        }
        worst
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut a = vec![vec![0.0; self.n]; self.n];
        for (i, row) in a.iter_mut().enumerate() {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                row[j] = v;
            }
        }
        a
    }

    /// Principal submatrix on `keep` (ascending), renumbered consecutively.
    pub fn submatrix(&self, keep: &[usize]) -> SparseSym {
        let mut map = vec![usize::MAX; self.n];
        for (new, &old) in keep.iter().enumerate() {
            map[old] = new;
        }
        let mut row_ptr = vec![0; keep.len() + 1];
        let mut col_idx = Vec::new();
        let mut vals = Vec::new();
        for (new, &old) in keep.iter().enumerate() {
            let (cols, vs) = self.row(old);
            for (&j, &v) in cols.iter().zip(vs) {
                if map[j] != usize::MAX {
                    col_idx.push(map[j]);
                    vals.push(v);
                }
            }
            row_ptr[new + 1] = col_idx.len();
        }
        SparseSym {
            n: keep.len(),
            row_ptr,
            col_idx,
            vals,
        }
    }

    /// Matrix Market coordinate text, lower triangle, 1-based.
    pub fn to_matrix_market(&self) -> String {
        let entries: Vec<(usize, usize, f64)> = (0..self.n)
            .flat_map(|i| {
                let (cols, vals) = self.row(i);
                cols.iter()
                    .zip(vals)
                    .filter(move |(&j, _)| j <= i)
                    .map(move |(&j, &v)| (i, j, v))
                    .collect::<Vec<_>>()
            })
            .collect();
        let mut s = String::from("%%MatrixMarket matrix coordinate real symmetric\n");
        let _ = writeln!(s, "{} {} {}", self.n, self.n, entries.len());
        for (i, j, v) in entries {
            let _ = writeln!(s, "{} {} {:e}", i + 1, j + 1, v);
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duplicates_are_summed() {
        let a = SparseSym::from_triplets(2, vec![(0, 0, 1.0), (1, 0, 2.0), (0, 1, 2.0), (0, 0, 3.0)]);
        assert_eq!(a.get(0, 0), 4.0);
        assert_eq!(a.get(1, 1), 0.0);
        assert_eq!(a.nnz(), 3);
        assert_eq!(a.mul(&[1.0, 1.0]), vec![6.0, 2.0]);
    }

    #[test]
    fn axpby_and_submatrix() {
        let a = SparseSym::from_dense(&[vec![2.0, -1.0, 0.0], vec![-1.0, 2.0, -1.0], vec![0.0, -1.0, 2.0]]);
        let i = SparseSym::from_dense(&[vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]]);
        let b = a.axpby(1.0, &i, -2.0);
        assert_eq!(b.get(1, 1), 0.0);
        assert_eq!(b.get(0, 1), -1.0);
        let s = a.submatrix(&[0, 2]);
        assert_eq!(s.to_dense(), vec![vec![2.0, 0.0], vec![0.0, 2.0]]);
    }

    #[test]
    fn matrix_market_header() {
        let a = SparseSym::from_dense(&[vec![2.0, -1.0], vec![-1.0, 2.0]]);
        let mm = a.to_matrix_market();
        let lines: Vec<&str> = mm.lines().collect();
        assert_eq!(lines[1], "2 2 3");
        assert_eq!(lines.len(), 5);
    }
}
