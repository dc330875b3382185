use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{CutPiece, Family};
use crate::error::{Error, Result};
use crate::geometry::{snap_curve, SurfaceMesh};
use crate::homology::Cut;
use crate::spectral::Partition;

const MAX_DRAWS: usize = 20;

/// Random k-partitions near the symmetric one of a family.
///
/// `Star`: k spokes from the origin to the unit circle at angles
/// `rotation + 360°·i/k ± jitter` (degrees). `Strips`: k curves
/// `x = x₀ + w·i/k ± jitter·w + a·sin(2πy/h + φ)` with `a ≤ amplitude`, running
/// across the chart of a cylinder or torus. Draws whose walls do not
/// produce exactly k parts are discarded.
pub fn perturbed_partitions(
    mesh: &SurfaceMesh,
    family: Family,
    k: usize,
    samples: usize,
    seed: u64,
    jitter: f64,
    amplitude: f64,
) -> Result<Vec<Partition>> {
    if k < 2 {
        return Err(Error::InvalidParameter(
            "perturbed partitions need k ≥ 2".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(samples);
    let mut draws = 0;
    while out.len() < samples {
        draws += 1;
        if draws > samples * MAX_DRAWS {
            return Err(Error::InvalidParameter(format!(
                "could not draw {samples} valid {k}-partitions in {} attempts",
                samples * MAX_DRAWS
            )));
        }
        let curves = match family {
            Family::Star => star(&mut rng, k, jitter),
            Family::Strips => strips(mesh, &mut rng, k, jitter, amplitude)?,
        };
        let mut paths = Vec::with_capacity(k);
        for c in &curves {
            paths.push(snap_curve(mesh, &c.polyline()?)?);
        }
        let walls = Cut::from_paths(mesh, paths.iter());
        let p = Partition::from_walls(mesh, walls.edges())?;
        if p.k() == k {
            out.push(p);
        }
    }
    Ok(out)
}

fn star(rng: &mut ChaCha8Rng, k: usize, jitter: f64) -> Vec<CutPiece> {
    let rot: f64 = rng.random_range(0.0..360.0);
    (0..k)
        .map(|i| {
            let j = if jitter > 0.0 {
                rng.random_range(-jitter..jitter)
            } else {
                0.0
            };
            CutPiece::Ray {
                angle: rot + 360.0 * i as f64 / k as f64 + j,
                inner: 0.0,
                outer: 1.0,
            }
        })
        .collect()
}

fn strips(
    mesh: &SurfaceMesh,
    rng: &mut ChaCha8Rng,
    k: usize,
    jitter: f64,
    amplitude: f64,
) -> Result<Vec<CutPiece>> {
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for p in mesh.vertices() {
        for d in 0..2 {
            lo[d] = lo[d].min(p[d]);
            hi[d] = hi[d].max(p[d]);
        }
    }
    let period = mesh.period();
    let width = period.x.unwrap_or(hi[0] - lo[0]);
    let height = period.y.unwrap_or(hi[1] - lo[1]);
    if !(width > 0.0 && height > 0.0) {
        return Err(Error::InvalidParameter(
            "strips need a two-dimensional chart".into(),
        ));
    }
    let x0 = lo[0] + rng.random_range(0.0..width);
    const SAMPLES: usize = 64;
    Ok((0..k)
        .map(|i| {
            let j = if jitter > 0.0 {
                rng.random_range(-jitter..jitter)
            } else {
                0.0
            };
            let a = if amplitude > 0.0 {
                rng.random_range(0.0..amplitude)
            } else {
                0.0
            };
            let phase = rng.random_range(0.0..std::f64::consts::TAU);
            let xi = x0 + width * (i as f64 / k as f64 + j);
            CutPiece::Polyline(
                (0..=SAMPLES)
                    .map(|s| {
                        let y = lo[1] + height * s as f64 / SAMPLES as f64;
                        let x = xi
                            + a * width
                                * (std::f64::consts::TAU * (y - lo[1]) / height + phase).sin();
                        vec![x, y]
                    })
                    .collect(),
            )
        })
        .collect())
}
