//! Sparse linear systems over GF(2).
//!
//! Elimination runs in two phases. A sparse phase pivots on light rows
//! (incidence-like systems such as ∂₂ never leave it); columns whose
//! elimination would cause too much fill are deferred to a dense phase on
//! packed 64-bit rows.

/// Sparse GF(2) system `A x = b`, one sorted column list per row.
#[derive(Clone, Debug, Default)]
pub struct Gf2System {
    ncols: usize,
    rows: Vec<Vec<u32>>,
    rhs: Vec<bool>,
}

/// Fill budget for a sparse pivot: (row weight − 1)·(column count − 1).
const FILL_LIMIT: usize = 64;

fn xor_sorted(a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

struct Elimination {
    pivots: Vec<(usize, Vec<u32>, bool)>,
    dense_cols: Vec<usize>,
    dense_rows: Vec<(Vec<u64>, bool)>,
}

impl Gf2System {
    pub fn new(ncols: usize) -> Self {
        Gf2System {
            ncols,
            rows: Vec::new(),
            rhs: Vec::new(),
        }
    }

    pub fn num_cols(&self) -> usize {
        self.ncols
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    /// Append a row; repeated columns cancel.
    pub fn push_row(&mut self, cols: impl IntoIterator<Item = usize>, rhs: bool) {
        let mut r: Vec<u32> = cols
            .into_iter()
            .map(|c| {
                assert!(c < self.ncols, "column {c} out of range");
                c as u32
            })
            .collect();
        r.sort_unstable();
        let mut out: Vec<u32> = Vec::with_capacity(r.len());
        for c in r {
            if out.last() == Some(&c) {
                out.pop();
            } else {
                out.push(c);
            }
        }
        self.rows.push(out);
        self.rhs.push(rhs);
    }

    /// True if `x` satisfies every row.
    pub fn check(&self, x: &[bool]) -> bool {
        self.rows
            .iter()
            .zip(&self.rhs)
            .all(|(r, &b)| r.iter().fold(false, |acc, &c| acc ^ x[c as usize]) == b)
    }

    fn eliminate(&self, order: &[usize]) -> Result<Elimination, ()> {
        let mut rows = self.rows.clone();
        let mut rhs = self.rhs.clone();
        let mut active = vec![true; rows.len()];
        let mut col_rows: Vec<Vec<usize>> = vec![Vec::new(); self.ncols];
        for (i, r) in rows.iter().enumerate() {
            for &c in r {
                col_rows[c as usize].push(i);
            }
        }
        let mut pivots = Vec::new();
        let mut deferred = Vec::new();
        for &c in order {
            let holders: Vec<usize> = {
                let cand = std::mem::take(&mut col_rows[c]);
                let mut h: Vec<usize> = cand
                    .into_iter()
                    .filter(|&i| active[i] && rows[i].binary_search(&(c as u32)).is_ok())
                    .collect();
                h.sort_unstable();
                h.dedup();
                h
            };
            if holders.is_empty() {
                continue;
            }
            let p = *holders.iter().min_by_key(|&&i| (rows[i].len(), i)).unwrap();
            let w = rows[p].len();
            if (w - 1) * (holders.len() - 1) > FILL_LIMIT {
                col_rows[c] = holders;
                deferred.push(c);
                continue;
            }
            active[p] = false;
            let prow = rows[p].clone();
            for &i in &holders {
                if i == p {
                    continue;
                }
                let nr = xor_sorted(&rows[i], &prow);
                for &j in &nr {
                    if rows[i].binary_search(&j).is_err() {
                        col_rows[j as usize].push(i);
                    }
                }
                rows[i] = nr;
                rhs[i] ^= rhs[p];
            }
            pivots.push((c, prow, rhs[p]));
        }

        // dense phase on what remains (only deferred columns can be left)
        let pos: std::collections::HashMap<usize, usize> =
            deferred.iter().enumerate().map(|(k, &c)| (c, k)).collect();
        let words = deferred.len().div_ceil(64);
        let mut dense: Vec<(Vec<u64>, bool)> = Vec::new();
        for i in 0..rows.len() {
            if !active[i] {
                continue;
            }
            if rows[i].is_empty() {
                if rhs[i] {
                    return Err(());
                }
                continue;
            }
            let mut bits = vec![0u64; words];
            for &c in &rows[i] {
                let k = pos[&(c as usize)];
                bits[k / 64] |= 1 << (k % 64);
            }
            dense.push((bits, rhs[i]));
        }
        let mut reduced: Vec<(Vec<u64>, bool)> = Vec::new();
        let mut pivot_cols: Vec<usize> = Vec::new();
        for k in 0..deferred.len() {
            let (wd, bit) = (k / 64, 1u64 << (k % 64));
            let Some(idx) = dense.iter().position(|(b, _)| b[wd] & bit != 0) else {
                continue;
            };
            let prow = dense.swap_remove(idx);
            for (b, r) in dense.iter_mut().chain(reduced.iter_mut()) {
                if b[wd] & bit != 0 {
                    for (x, y) in b.iter_mut().zip(&prow.0) {
                        *x ^= *y;
                    }
                    *r ^= prow.1;
                }
            }
            reduced.push(prow);
            pivot_cols.push(k);
        }
        if dense.iter().any(|(b, r)| *r && b.iter().all(|&w| w == 0)) {
            return Err(());
        }
        Ok(Elimination {
            pivots,
            dense_cols: pivot_cols.into_iter().map(|k| deferred[k]).collect(),
            dense_rows: reduced,
        })
    }

    /// One solution (free variables zero), or `None` if inconsistent.
    pub fn solve(&self) -> Option<Vec<bool>> {
        let order: Vec<usize> = (0..self.ncols).collect();
        self.solve_with_order(&order)
    }

    /// Solve, eliminating columns in `order`; columns late in the order are
    /// preferred as free (zero) variables.
    pub fn solve_with_order(&self, order: &[usize]) -> Option<Vec<bool>> {
        let el = self.eliminate(order).ok()?;
        let mut x = vec![false; self.ncols];
        // reduced dense rows are in Gauss-Jordan form over pivot columns
        for ((_, r), &c) in el.dense_rows.iter().zip(&el.dense_cols) {
            x[c] = *r;
        }
        for (c, row, r) in el.pivots.iter().rev() {
            let mut v = *r;
            for &j in row {
                if j as usize != *c {
                    v ^= x[j as usize];
                }
            }
            x[*c] = v;
        }
        debug_assert!(self.check(&x));
        Some(x)
    }

    /// Rank of the coefficient matrix.
    pub fn rank(&self) -> usize {
        let mut lhs_only = self.clone();
        lhs_only.rhs.iter_mut().for_each(|b| *b = false);
        let order: Vec<usize> = (0..self.ncols).collect();
        let el = lhs_only
            .eliminate(&order)
            .expect("homogeneous system is consistent");
        el.pivots.len() + el.dense_rows.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn dense_rank(rows: &[Vec<usize>], ncols: usize) -> usize {
        let mut m: Vec<Vec<bool>> = rows
            .iter()
            .map(|r| {
                let mut v = vec![false; ncols];
                for &c in r {
                    v[c] ^= true;
                }
                v
            })
            .collect();
        let mut rank = 0;
        for c in 0..ncols {
            if let Some(p) = (rank..m.len()).find(|&i| m[i][c]) {
                m.swap(rank, p);
                for i in 0..m.len() {
                    if i != rank && m[i][c] {
                        let pr = m[rank].clone();
                        for (a, b) in m[i].iter_mut().zip(pr) {
                            *a ^= b;
                        }
                    }
                }
                rank += 1;
            }
        }
        rank
    }

    #[test]
    fn small_system() {
        let mut s = Gf2System::new(3);
        s.push_row([0, 1], true);
        s.push_row([1, 2], false);
        s.push_row([0, 2], true);
        let x = s.solve().unwrap();
        assert!(s.check(&x));
        assert_eq!(s.rank(), 2);
        s.push_row([0, 1, 2, 2], false);
        // x0 + x1 = 1 contradicts the new row
        assert!(s.solve().is_none());
    }

    #[test]
    fn duplicate_columns_cancel() {
        let mut s = Gf2System::new(2);
        s.push_row([1, 1], true);
        assert!(s.solve().is_none());
    }

    #[test]
    fn dense_phase_is_exercised() {
        // a full-ish random matrix forces deferral
        let n = 150;
        let mut s = Gf2System::new(n);
        let mut rows = Vec::new();
        let mut state = 12345u64;
        for _ in 0..n {
            let mut r = Vec::new();
            for c in 0..n {
                state = state
                    .wrapping_mul(6364136223846793005)
                    .wrapping_add(1442695040888963407);
                if state >> 62 == 0 {
                    r.push(c);
                }
            }
            rows.push(r.clone());
            s.push_row(r, (state >> 20) & 1 == 1);
        }
        assert_eq!(s.rank(), dense_rank(&rows, n));
        if let Some(x) = s.solve() {
            assert!(s.check(&x));
        }
    }

    proptest! {
        #[test]
        fn rank_and_solution_match_dense(
            ncols in 1usize..24,
            rows in prop::collection::vec(prop::collection::vec(0usize..24, 0..6), 0..30),
            planted in prop::collection::vec(any::<bool>(), 24),
        ) {
            let rows: Vec<Vec<usize>> = rows.into_iter().map(|r| r.into_iter().filter(|&c| c < ncols).collect()).collect();
            let mut s = Gf2System::new(ncols);
            for r in &rows {
                let b = r.iter().fold(false, |a, &c| a ^ planted[c]);
                s.push_row(r.iter().copied(), b);
            }
            prop_assert_eq!(s.rank(), dense_rank(&rows, ncols));
            let x = s.solve().expect("planted solution exists");
            prop_assert!(s.check(&x));
        }
    }
}
