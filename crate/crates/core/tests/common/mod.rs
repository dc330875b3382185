#![allow(dead_code)]

use std::collections::{BTreeSet, VecDeque};

use nalgebra::DMatrix;
use rand::seq::IndexedRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use cutlap::geometry::{
    build_annulus, build_disk, build_rectangle, build_sphere, snap_curve, Identify, SurfaceMesh,
};
use cutlap::homology::Cut;
use cutlap::sparse::SparseSym;

/// All generalized eigenvalues of a small pair by Cholesky reduction and a dense symmetric solve.
pub fn dense_eigenvalues(k: &SparseSym, m: &SparseSym) -> Vec<f64> {
    let n = k.dim();
    let kd = DMatrix::from_fn(n, n, |i, j| k.get(i, j));
    let md = DMatrix::from_fn(n, n, |i, j| m.get(i, j));
    let l = md.cholesky().expect("mass matrix is positive definite").l();
    let li = l
        .clone()
        .try_inverse()
        .expect("Cholesky factor is invertible");
    let c = &li * kd * li.transpose();
    let c = 0.5 * (&c + c.transpose());
    let mut v: Vec<f64> = c.symmetric_eigen().eigenvalues.iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

pub fn rel_diff(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

pub fn cut_along(mesh: &SurfaceMesh, polylines: &[Vec<[f64; 3]>]) -> Cut {
    let paths: Vec<_> = polylines
        .iter()
        .map(|p| snap_curve(mesh, p).expect("curve snaps"))
        .collect();
    Cut::from_paths(mesh, paths.iter())
}

/// A canonical surface with cuts spanning its relative first homology.
pub struct Surface {
    pub name: &'static str,
    pub mesh: SurfaceMesh,
    pub generators: Vec<Cut>,
}

pub fn canonical_surfaces() -> Vec<Surface> {
    surfaces(1)
}

/// Canonical surfaces small enough for dense solves (at most 200 dofs per operator).
pub fn small_surfaces() -> Vec<Surface> {
    surfaces(0)
}

fn surfaces(level: usize) -> Vec<Surface> {
    let g = |n: usize| n << level;
    let disk = build_disk(2 + level).unwrap();
    let disk_gen = vec![cut_along(&disk, &[vec![[-1.0, 0.0, 0.0], [1.0, 0.0, 0.0]]])];
    let sphere = build_sphere(1 + level).unwrap();
    let cyl = build_rectangle(1.0, 0.6, g(12), g(7), Identify::Horizontal).unwrap();
    let cyl_gen = vec![cut_along(&cyl, &[vec![[0.5, 0.0, 0.0], [0.5, 0.6, 0.0]]])];
    let torus = build_rectangle(1.0, 0.7, g(12), g(8), Identify::Both).unwrap();
    let torus_gen = vec![
        cut_along(
            &torus,
            &[vec![[0.25, 0.0, 0.0], [0.25, 0.35, 0.0], [0.25, 0.7, 0.0]]],
        ),
        cut_along(
            &torus,
            &[vec![[0.0, 0.35, 0.0], [0.5, 0.35, 0.0], [1.0, 0.35, 0.0]]],
        ),
    ];
    let annulus = build_annulus(1.0, 2.0, g(24), g(4)).unwrap();
    let ann_gen = vec![cut_along(
        &annulus,
        &[vec![[1.0, 0.0, 0.0], [2.0, 0.0, 0.0]]],
    )];
    let rect = build_rectangle(1.0, 1.0, g(8), g(8), Identify::None).unwrap();
    let rect_gen = vec![cut_along(&rect, &[vec![[0.5, 0.0, 0.0], [0.5, 1.0, 0.0]]])];
    vec![
        Surface {
            name: "disk",
            mesh: disk,
            generators: disk_gen,
        },
        Surface {
            name: "sphere",
            mesh: sphere,
            generators: vec![],
        },
        Surface {
            name: "cylinder",
            mesh: cyl,
            generators: cyl_gen,
        },
        Surface {
            name: "torus",
            mesh: torus,
            generators: torus_gen,
        },
        Surface {
            name: "annulus",
            mesh: annulus,
            generators: ann_gen,
        },
        Surface {
            name: "rectangle",
            mesh: rect,
            generators: rect_gen,
        },
    ]
}

/// Dual-connected blob of up to `size` triangles grown from a random seed.
pub fn random_blob(mesh: &SurfaceMesh, rng: &mut ChaCha8Rng, size: usize) -> BTreeSet<usize> {
    let seed = rng.random_range(0..mesh.num_triangles());
    let mut blob = BTreeSet::from([seed]);
    let mut frontier = VecDeque::from([seed]);
    while blob.len() < size {
        let Some(t) = frontier.pop_front() else { break };
        for e in mesh.triangle_edges(t) {
            let u = mesh.other_triangle(e, t);
            if u != cutlap::geometry::NO_TRIANGLE && rng.random_bool(0.7) && blob.insert(u) {
                frontier.push_back(u);
            }
        }
        if frontier.is_empty() {
            frontier.extend(blob.iter().copied());
        }
    }
    blob
}

/// Interior edges with exactly one side in `chain`: the relative boundary ∂₂ω.
pub fn chain_boundary(mesh: &SurfaceMesh, chain: &BTreeSet<usize>) -> Cut {
    let edges = (0..mesh.num_edges()).filter(|&e| {
        !mesh.is_boundary_edge(e)
            && mesh
                .edge_triangles(e)
                .iter()
                .filter(|t| chain.contains(t))
                .count()
                == 1
    });
    Cut::new(mesh, edges).unwrap()
}

/// Symmetric difference of `base` with the boundary of a few random blobs.
pub fn random_homologous(mesh: &SurfaceMesh, base: &Cut, rng: &mut ChaCha8Rng) -> Cut {
    let mut chain = BTreeSet::new();
    for _ in 0..rng.random_range(1..=3) {
        let size = rng.random_range(1..=mesh.num_triangles() / 6 + 1);
        for t in random_blob(mesh, rng, size) {
            if !chain.insert(t) {
                chain.remove(&t);
            }
        }
    }
    base.symmetric_difference(&chain_boundary(mesh, &chain))
        .unwrap()
}

/// Random relative cycle: a random sum of generators plus a random boundary.
pub fn random_relative_cycle(surface: &Surface, rng: &mut ChaCha8Rng) -> Cut {
    let mut cut = Cut::empty(&surface.mesh);
    for g in &surface.generators {
        if rng.random_bool(0.5) {
            cut = cut.symmetric_difference(g).unwrap();
        }
    }
    random_homologous(&surface.mesh, &cut, rng)
}

/// Radial edge path from the disk centre to the boundary at a random angle.
pub fn random_spoke(mesh: &SurfaceMesh, rng: &mut ChaCha8Rng) -> Cut {
    let angles = [0.0f64, 60.0, 120.0, 180.0, 240.0, 300.0];
    let a = angles.choose(rng).unwrap().to_radians();
    cut_along(mesh, &[vec![[0.0, 0.0, 0.0], [a.cos(), a.sin(), 0.0]]])
}
