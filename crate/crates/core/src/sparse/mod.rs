//! Symmetric sparse matrices and a sparse LDLᵀ factorization.

mod ldl;
mod ordering;

pub use ldl::{Inertia, Ldl};
pub use ordering::nested_dissection;

use std::io::Write;

use crate::error::{Error, Result};

/// Symmetric matrix in compressed-row form, both triangles stored.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseSym {
    n: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl SparseSym {
    /// Sum duplicate entries. The caller supplies both `(i, j)` and `(j, i)`.
    pub fn from_triplets(n: usize, mut triplets: Vec<(usize, usize, f64)>) -> Self {
        triplets.sort_by_key(|&(i, j, _)| (i, j));
        let mut row_ptr = vec![0; n + 1];
        let mut col_idx = Vec::with_capacity(triplets.len());
        let mut values: Vec<f64> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        for (i, j, v) in triplets {
            assert!(i < n && j < n, "entry ({i}, {j}) outside dimension {n}");
            if last == Some((i, j)) {
                *values.last_mut().unwrap() += v;
            } else {
                col_idx.push(j);
                values.push(v);
                row_ptr[i + 1] += 1;
                last = Some((i, j));
            }
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        SparseSym {
            n,
            row_ptr,
            col_idx,
            values,
        }
    }

    pub fn from_diagonal(d: &[f64]) -> Self {
        SparseSym::from_triplets(
            d.len(),
            d.iter().enumerate().map(|(i, &v)| (i, i, v)).collect(),
        )
    }

    pub fn identity(n: usize) -> Self {
        SparseSym::from_diagonal(&vec![1.0; n])
    }

    /// From a dense symmetric matrix (zeros dropped).
    pub fn from_dense(a: &[Vec<f64>]) -> Self {
        let n = a.len();
        let mut t = Vec::new();
        for (i, row) in a.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                if v != 0.0 {
                    t.push((i, j, v));
                }
            }
        }
        SparseSym::from_triplets(n, t)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Stored entries (both triangles).
    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        self.col_idx[r.clone()]
            .iter()
            .copied()
            .zip(self.values[r].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        match self.col_idx[r.clone()].binary_search(&j) {
            Ok(k) => self.values[r.start + k],
            Err(_) => 0.0,
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    pub fn mul_vec_into(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate().take(self.n) {
            let mut s = 0.0;
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                s += self.values[k] * x[self.col_idx[k]];
            }
            *yi = s;
        }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        self.mul_vec_into(x, &mut y);
        y
    }

    /// `xᵀ A x`
    pub fn quad_form(&self, x: &[f64]) -> f64 {
        (0..self.n)
            .map(|i| x[i] * self.row(i).map(|(j, v)| v * x[j]).sum::<f64>())
            .sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        (0..self.n).all(|i| {
            self.row(i)
                .all(|(j, v)| (self.get(j, i) - v).abs() <= tol * v.abs().max(1.0))
        })
    }

    /// `alpha·self + beta·other`.
    pub fn linear_combination(
        &self,
        alpha: f64,
        other: &SparseSym,
        beta: f64,
    ) -> Result<SparseSym> {
        if self.n != other.n {
            return Err(Error::InvalidParameter(format!(
                "dimension mismatch: {} vs {}",
                self.n, other.n
            )));
        }
        let mut t = Vec::with_capacity(self.nnz() + other.nnz());
        for i in 0..self.n {
            t.extend(self.row(i).map(|(j, v)| (i, j, alpha * v)));
            t.extend(other.row(i).map(|(j, v)| (i, j, beta * v)));
        }
        Ok(SparseSym::from_triplets(self.n, t))
    }

    /// `D A D` for a diagonal of ±1 (or any) scale factors.
    pub fn conjugate_diagonal(&self, d: &[f64]) -> SparseSym {
        let mut out = self.clone();
        for i in 0..self.n {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                out.values[k] *= d[i] * d[self.col_idx[k]];
            }
        }
        out
    }

    /// Restriction to the listed rows and columns, in that order.
    pub fn principal_submatrix(&self, keep: &[usize]) -> SparseSym {
        let mut pos = vec![usize::MAX; self.n];
        for (k, &i) in keep.iter().enumerate() {
            pos[i] = k;
        }
        let mut t = Vec::new();
        for (k, &i) in keep.iter().enumerate() {
            for (j, v) in self.row(i) {
                if pos[j] != usize::MAX {
                    t.push((k, pos[j], v));
                }
            }
        }
        SparseSym::from_triplets(keep.len(), t)
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut a = vec![vec![0.0; self.n]; self.n];
        for (i, row) in a.iter_mut().enumerate() {
            for (j, v) in self.row(i) {
                row[j] = v;
            }
        }
        a
    }

    /// Coordinate text: `i j value` per line, lower triangle, 0-based.
    pub fn write_coordinate(&self, mut w: impl Write) -> Result<()> {
        writeln!(w, "% symmetric {} {} {}", self.n, self.n, self.lower_nnz())?;
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                if j <= i {
                    writeln!(w, "{i} {j} {v:e}")?;
                }
            }
        }
        Ok(())
    }

    fn lower_nnz(&self) -> usize {
        (0..self.n)
            .map(|i| self.row(i).filter(|&(j, _)| j <= i).count())
            .sum()
    }

    pub(crate) fn pattern(&self) -> (&[usize], &[usize]) {
        (&self.row_ptr, &self.col_idx)
    }
}
