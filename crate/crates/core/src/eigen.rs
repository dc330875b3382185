//! Smallest eigenpairs of `K x = λ M x`.
//!
//! Shift-invert block Krylov iteration with Rayleigh–Ritz on `K` in an
//! M-orthonormal basis, restarted from the current Ritz block. After
//! convergence the count of eigenvalues below a gap is checked against the
//! inertia of `K − τM`, so no eigenvalue in the returned range is missed.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sparse::{Ldl, SparseSym};

/// Relative gap below which neighbouring eigenvalues count as one multiple eigenvalue.
pub const MULTIPLICITY_GAP: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenOptions {
    /// Relative residual target: `‖Kx − λMx‖ / ‖Mx‖ ≤ tol · max(1, |λ|)`, or
    /// `10⁴ ε ‖K‖/‖M‖` (entrywise max norms) if that is larger.
    pub tol: f64,
    pub seed: u64,
    /// Extra pairs computed beyond the requested count.
    pub headroom: usize,
    /// Spectral shift; must lie below the smallest eigenvalue.
    pub shift: f64,
    pub max_iterations: usize,
    pub verify_inertia: bool,
}

impl Default for EigenOptions {
    fn default() -> Self {
        EigenOptions {
            tol: 1e-8,
            seed: 0,
            headroom: 3,
            shift: -1.0,
            max_iterations: 200,
            verify_inertia: true,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SolverStats {
    pub seed: u64,
    pub iterations: usize,
    pub operator_applications: usize,
    pub max_basis_dimension: usize,
    pub factor_nnz: usize,
    pub shift: f64,
    /// `Some(true)` if an inertia count confirmed the computed range.
    pub inertia_verified: Option<bool>,
    pub inertia_restarts: usize,
}

/// Ascending eigenpairs with residual certificates.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    #[serde(skip)]
    pub eigenvectors: Vec<Vec<f64>>,
    pub residuals: Vec<f64>,
    /// Converged head-room eigenvalues beyond the requested ones.
    pub trailing: Vec<f64>,
    pub stats: SolverStats,
}

impl Spectrum {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// Requested and head-room eigenvalues together.
    pub fn all_eigenvalues(&self) -> Vec<f64> {
        let mut v = self.eigenvalues.clone();
        v.extend_from_slice(&self.trailing);
        v
    }

    /// Index ranges of (numerically) equal eigenvalues among the requested ones.
    pub fn multiplicity_groups(&self) -> Vec<std::ops::Range<usize>> {
        let mut groups = Vec::new();
        let mut start = 0;
        for i in 1..=self.eigenvalues.len() {
            if i == self.eigenvalues.len()
                || !same_eigenvalue(self.eigenvalues[i - 1], self.eigenvalues[i])
            {
                groups.push(start..i);
                start = i;
            }
        }
        groups
    }
}

pub(crate) fn same_eigenvalue(a: f64, b: f64) -> bool {
    (a - b).abs() <= MULTIPLICITY_GAP * a.abs().max(b.abs()).max(1e-300)
}

/// Result of an inertia count.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CountBelow {
    pub count: usize,
    /// Threshold actually used.
    pub threshold: f64,
    /// True if the requested threshold had to be moved off a (near) eigenvalue.
    pub adjusted: bool,
}

fn check_pair(k: &SparseSym, m: &SparseSym) -> Result<()> {
    if k.dim() != m.dim() {
        return Err(Error::InvalidParameter(format!(
            "stiffness is {0}x{0} but mass is {1}x{1}",
            k.dim(),
            m.dim()
        )));
    }
    Ok(())
}

/// Number of eigenvalues strictly below `threshold`, from the inertia of `K − threshold·M`.
pub fn eigenvalue_count_below(k: &SparseSym, m: &SparseSym, threshold: f64) -> Result<CountBelow> {
    check_pair(k, m)?;
    if !threshold.is_finite() {
        return Err(Error::InvalidParameter("threshold must be finite".into()));
    }
    let mut last_err = None;
    for attempt in 0..8 {
        let tau = if attempt == 0 {
            threshold
        } else {
            threshold - threshold.abs().max(1.0) * 1e-9 * 4f64.powi(attempt - 1)
        };
        let a = k.linear_combination(1.0, m, -tau)?;
        match Ldl::factor(&a) {
            Ok(f) if f.pivot_ratio() > 1e-13 => {
                return Ok(CountBelow {
                    count: f.inertia().negative,
                    threshold: tau,
                    adjusted: attempt > 0,
                });
            }
            Ok(_) => last_err = Some(Error::Factorization("near-singular shifted matrix".into())),
            Err(e) => last_err = Some(e),
        }
    }
    Err(last_err.unwrap())
}

struct Basis<'a> {
    m: &'a SparseSym,
    q: Vec<Vec<f64>>,
    mq: Vec<Vec<f64>>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

impl Basis<'_> {
    /// M-orthogonalize `w` against the basis (two passes) and append it
    /// unless it is numerically dependent.
    fn push(&mut self, mut w: Vec<f64>) -> bool {
        let norm0 = self.m.quad_form(&w).max(0.0).sqrt();
        if norm0 == 0.0 || !norm0.is_finite() {
            return false;
        }
        for _ in 0..2 {
            for (qj, mqj) in self.q.iter().zip(&self.mq) {
                let c = dot(mqj, &w);
                axpy(-c, qj, &mut w);
            }
        }
        let mw = self.m.mul_vec(&w);
        let nrm = dot(&w, &mw).max(0.0).sqrt();
        if nrm <= 1e-10 * norm0 {
            return false;
        }
        let s = 1.0 / nrm;
        w.iter_mut().for_each(|v| *v *= s);
        self.mq.push(mw.into_iter().map(|v| v * s).collect());
        self.q.push(w);
        true
    }
}

/// The `k` smallest eigenpairs with default options.
pub fn smallest_eigenpairs(
    k_mat: &SparseSym,
    m_mat: &SparseSym,
    k: usize,
    tol: f64,
    seed: u64,
) -> Result<Spectrum> {
    let opts = EigenOptions {
        tol,
        seed,
        ..EigenOptions::default()
    };
    smallest_eigenpairs_with(k_mat, m_mat, k, &opts)
}

pub fn smallest_eigenpairs_with(
    k_mat: &SparseSym,
    m_mat: &SparseSym,
    k: usize,
    opts: &EigenOptions,
) -> Result<Spectrum> {
    check_pair(k_mat, m_mat)?;
    let n = k_mat.dim();
    if k == 0 || k > n {
        return Err(Error::InvalidParameter(format!(
            "requested {k} eigenpairs of a {n}-dimensional problem"
        )));
    }
    if !(opts.tol > 0.0) {
        return Err(Error::InvalidParameter("tolerance must be positive".into()));
    }

    let mut shift = opts.shift;
    let factor = {
        let mut tries = 0;
        loop {
            let a = k_mat.linear_combination(1.0, m_mat, -shift)?;
            match Ldl::factor(&a) {
                Ok(f) if f.inertia().negative == 0 => break f,
                Ok(_) | Err(_) if tries < 6 => {
                    tries += 1;
                    shift = shift * 4.0 - 1.0;
                }
                Ok(_) => {
                    return Err(Error::Factorization(format!(
                        "K − σM is indefinite for every tried shift down to {shift}"
                    )))
                }
                Err(e) => return Err(e),
            }
        }
    };

    let mut stats = SolverStats {
        seed: opts.seed,
        shift,
        factor_nnz: factor.factor_nnz(),
        ..Default::default()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut nev = (k + opts.headroom).min(n);
    let mut work = Vec::new();
    let mut apply = |x: &[f64], stats: &mut SolverStats| -> Vec<f64> {
        stats.operator_applications += 1;
        let mut y = m_mat.mul_vec(x);
        factor.solve_in_place(&mut y, &mut work);
        y
    };

    // residuals below this are rounding noise of the shift-invert solves
    let floor = 1e4 * f64::EPSILON * k_mat.max_abs() / m_mat.max_abs().max(f64::MIN_POSITIVE);
    let mut extra_random = 0;
    loop {
        let p = (nev + 4.max(nev / 2) + extra_random).min(n);
        let steps = 3;
        let mut x_block: Vec<Vec<f64>> = (0..p)
            .map(|_| (0..n).map(|_| rng.random_range(-1.0..1.0)).collect())
            .collect();
        x_block = x_block.iter().map(|v| apply(v, &mut stats)).collect();

        let (values, vectors, residuals) = loop {
            stats.iterations += 1;
            if stats.iterations > opts.max_iterations {
                return Err(Error::Convergence(format!(
                    "{} iterations without reaching tol {:e} for {nev} pairs (dimension {n})",
                    opts.max_iterations, opts.tol
                )));
            }
            let mut basis = Basis {
                m: m_mat,
                q: Vec::new(),
                mq: Vec::new(),
            };
            let mut block: Vec<Vec<f64>> = Vec::new();
            for v in x_block.drain(..) {
                if basis.push(v) {
                    block.push(basis.q.last().unwrap().clone());
                }
            }
            for _ in 0..steps {
                if basis.q.len() >= n {
                    break;
                }
                let mut next = Vec::new();
                for v in &block {
                    let w = apply(v, &mut stats);
                    if basis.push(w) {
                        next.push(basis.q.last().unwrap().clone());
                    }
                    if basis.q.len() >= n {
                        break;
                    }
                }
                if next.is_empty() {
                    break;
                }
                block = next;
            }
            // top up with random directions if the Krylov space collapsed
            while basis.q.len() < p.min(n) {
                let r: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
                let r = apply(&r, &mut stats);
                basis.push(r);
            }
            let qn = basis.q.len();
            stats.max_basis_dimension = stats.max_basis_dimension.max(qn);

            let kq: Vec<Vec<f64>> = basis.q.iter().map(|v| k_mat.mul_vec(v)).collect();
            let t = DMatrix::from_fn(qn, qn, |i, j| {
                0.5 * (dot(&basis.q[i], &kq[j]) + dot(&basis.q[j], &kq[i]))
            });
            let eig = SymmetricEigen::new(t);
            let mut idx: Vec<usize> = (0..qn).collect();
            idx.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

            let keep = p.min(qn);
            let combine = |cols: &[Vec<f64>], j: usize| -> Vec<f64> {
                let mut out = vec![0.0; n];
                for (i, c) in cols.iter().enumerate() {
                    axpy(eig.eigenvectors[(i, idx[j])], c, &mut out);
                }
                out
            };
            let mut values = Vec::with_capacity(keep);
            let mut vectors = Vec::with_capacity(keep);
            let mut residuals = Vec::with_capacity(keep);
            for j in 0..keep {
                let lam = eig.eigenvalues[idx[j]];
                let x = combine(&basis.q, j);
                let mx = m_mat.mul_vec(&x);
                let kx = k_mat.mul_vec(&x);
                let r: f64 = kx
                    .iter()
                    .zip(&mx)
                    .map(|(a, b)| (a - lam * b).powi(2))
                    .sum::<f64>()
                    .sqrt();
                let nmx = dot(&mx, &mx).sqrt();
                values.push(lam);
                residuals.push(r / nmx);
                vectors.push(x);
            }
            let converged =
                (0..nev).all(|j| residuals[j] <= (opts.tol * values[j].abs().max(1.0)).max(floor));
            if converged || qn >= n {
                break (values, vectors, residuals);
            }
            x_block = vectors;
        };

        if !opts.verify_inertia || nev >= n {
            return Ok(finish(values, vectors, residuals, k, nev, stats));
        }
        // find a gap at or after position k among the converged values
        let gap_at =
            (k..nev).find(|&j| values[j] - values[j - 1] > 1e-4 * values[j].abs().max(1.0));
        let Some(j) = gap_at else {
            // a cluster straddles the end of the computed range: widen it
            nev = (nev + 4).min(n);
            continue;
        };
        let tau = 0.5 * (values[j - 1] + values[j]);
        let count = eigenvalue_count_below(k_mat, m_mat, tau)?;
        if count.count == j {
            stats.inertia_verified = Some(true);
            return Ok(finish(values, vectors, residuals, k, nev, stats));
        }
        stats.inertia_restarts += 1;
        if stats.inertia_restarts > 4 {
            return Err(Error::Convergence(format!(
                "inertia reports {} eigenvalues below {tau}, solver found {j}",
                count.count
            )));
        }
        // missed eigenvalues: enlarge the block and restart from scratch
        extra_random += count.count.saturating_sub(j) + 2;
        nev = (nev + count.count.saturating_sub(j)).min(n);
    }
}

fn finish(
    values: Vec<f64>,
    mut vectors: Vec<Vec<f64>>,
    residuals: Vec<f64>,
    k: usize,
    nev: usize,
    stats: SolverStats,
) -> Spectrum {
    for v in vectors.iter_mut() {
        let (imax, _) = v.iter().enumerate().fold((0, 0.0f64), |(bi, bv), (i, x)| {
            if x.abs() > bv + 1e-12 * bv {
                (i, x.abs())
            } else {
                (bi, bv)
            }
        });
        if v[imax] < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
    }
    vectors.truncate(k);
    Spectrum {
        eigenvalues: values[..k].to_vec(),
        eigenvectors: vectors,
        residuals: residuals[..k].to_vec(),
        trailing: values[k..nev.min(values.len())].to_vec(),
        stats,
    }
}
