use serde::{Deserialize, Serialize};

use super::{nested_dissection, SparseSym};
use crate::error::{Error, Result};

const NONE: usize = usize::MAX;

/// Sparse `P A Pᵀ = L D Lᵀ` without pivoting (up-looking, elimination-tree based).
#[derive(Clone, Debug)]
pub struct Ldl {
    n: usize,
    perm: Vec<usize>,
    lp: Vec<usize>,
    li: Vec<usize>,
    lx: Vec<f64>,
    d: Vec<f64>,
}

/// Signs of the pivots of an LDLᵀ factorization.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Inertia {
    pub negative: usize,
    pub zero: usize,
    pub positive: usize,
}

impl Ldl {
    /// Factor with a nested-dissection ordering.
    pub fn factor(a: &SparseSym) -> Result<Self> {
        let perm = nested_dissection(a);
        Self::factor_with(a, perm)
    }

    /// Factor with a caller-provided ordering (`perm[new] = old`).
    pub fn factor_with(a: &SparseSym, perm: Vec<usize>) -> Result<Self> {
        let n = a.dim();
        if perm.len() != n {
            return Err(Error::InvalidParameter(
                "ordering length differs from dimension".into(),
            ));
        }
        let mut pinv = vec![NONE; n];
        for (k, &i) in perm.iter().enumerate() {
            pinv[i] = k;
        }

        // symbolic: elimination tree and column counts
        let mut parent = vec![NONE; n];
        let mut flag = vec![NONE; n];
        let mut lnz = vec![0usize; n];
        for k in 0..n {
            flag[k] = k;
            for (j, _) in a.row(perm[k]) {
                let mut i = pinv[j];
                if i < k {
                    while flag[i] != k {
                        if parent[i] == NONE {
                            parent[i] = k;
                        }
                        lnz[i] += 1;
                        flag[i] = k;
                        i = parent[i];
                    }
                }
            }
        }
        let mut lp = vec![0usize; n + 1];
        for k in 0..n {
            lp[k + 1] = lp[k] + lnz[k];
        }
        let total = lp[n];

        // numeric
        let mut li = vec![0usize; total];
        let mut lx = vec![0.0; total];
        let mut d = vec![0.0; n];
        let mut y = vec![0.0; n];
        let mut pattern = vec![0usize; n];
        lnz.iter_mut().for_each(|c| *c = 0);
        flag.iter_mut().for_each(|f| *f = NONE);
        let scale = a.max_abs().max(f64::MIN_POSITIVE);
        for k in 0..n {
            let mut top = n;
            flag[k] = k;
            for (j, v) in a.row(perm[k]) {
                let mut i = pinv[j];
                if i <= k {
                    y[i] += v;
                    let mut len = 0;
                    while flag[i] != k {
                        pattern[len] = i;
                        len += 1;
                        flag[i] = k;
                        i = parent[i];
                    }
                    while len > 0 {
                        top -= 1;
                        len -= 1;
                        pattern[top] = pattern[len];
                    }
                }
            }
            d[k] = y[k];
            y[k] = 0.0;
            for &i in &pattern[top..n] {
                let yi = y[i];
                y[i] = 0.0;
                let end = lp[i] + lnz[i];
                for p in lp[i]..end {
                    y[li[p]] -= lx[p] * yi;
                }
                let l_ki = yi / d[i];
                d[k] -= l_ki * yi;
                li[end] = k;
                lx[end] = l_ki;
                lnz[i] += 1;
            }
            if !d[k].is_finite() || d[k].abs() <= 1e-300 * scale {
                return Err(Error::Factorization(format!(
                    "zero pivot at step {k} of {n} (original index {})",
                    perm[k]
                )));
            }
        }
        Ok(Ldl {
            n,
            perm,
            lp,
            li,
            lx,
            d,
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Nonzeros of the strictly lower factor.
    pub fn factor_nnz(&self) -> usize {
        self.lx.len()
    }

    pub fn pivots(&self) -> &[f64] {
        &self.d
    }

    /// Smallest |pivot| relative to the largest.
    pub fn pivot_ratio(&self) -> f64 {
        let (lo, hi) = self.d.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), v| {
            (lo.min(v.abs()), hi.max(v.abs()))
        });
        if hi == 0.0 {
            0.0
        } else {
            lo / hi
        }
    }

    /// Pivot signs; by Sylvester's law this is the inertia of `A`.
    pub fn inertia(&self) -> Inertia {
        let mut out = Inertia {
            negative: 0,
            zero: 0,
            positive: 0,
        };
        for &v in &self.d {
            if v < 0.0 {
                out.negative += 1;
            } else if v > 0.0 {
                out.positive += 1;
            } else {
                out.zero += 1;
            }
        }
        out
    }

    /// Solve `A x = b` in place.
    pub fn solve_in_place(&self, b: &mut [f64], work: &mut Vec<f64>) {
        let n = self.n;
        work.resize(n, 0.0);
        for k in 0..n {
            work[k] = b[self.perm[k]];
        }
        for j in 0..n {
            let yj = work[j];
            if yj != 0.0 {
                for p in self.lp[j]..self.lp[j + 1] {
                    work[self.li[p]] -= self.lx[p] * yj;
                }
            }
        }
        for j in 0..n {
            work[j] /= self.d[j];
        }
        for j in (0..n).rev() {
            let mut s = work[j];
            for p in self.lp[j]..self.lp[j + 1] {
                s -= self.lx[p] * work[self.li[p]];
            }
            work[j] = s;
        }
        for k in 0..n {
            b[self.perm[k]] = work[k];
        }
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = b.to_vec();
        let mut work = Vec::new();
        self.solve_in_place(&mut x, &mut work);
        x
    }
}
