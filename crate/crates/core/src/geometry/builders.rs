use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{refine, refine_graded, Period, SurfaceMesh, SurfaceTag, Vec3};
use crate::error::{Error, Result};

/// Side identification for [`build_rectangle`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Identify {
    /// Flat rectangle with boundary.
    None,
    /// Glue `x = 0` to `x = width`: a cylinder.
    Horizontal,
    /// Glue both pairs of sides: a flat torus.
    Both,
}

fn check_length(name: &str, v: f64) -> Result<()> {
    if !v.is_finite() || v <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "{name} must be positive and finite, got {v}"
        )));
    }
    Ok(())
}

/// Structured grid on `[0,width] x [0,height]`, each cell split along its
/// rising diagonal. Identified directions need at least 3 cells so that
/// every vertex pair spans a unique edge.
pub fn build_rectangle(
    width: f64,
    height: f64,
    nx: usize,
    ny: usize,
    identify: Identify,
) -> Result<SurfaceMesh> {
    check_length("width", width)?;
    check_length("height", height)?;
    if nx < 2 || ny < 2 {
        return Err(Error::InvalidParameter(format!(
            "need nx, ny >= 2, got {nx} x {ny}"
        )));
    }
    let wrap_x = identify != Identify::None;
    let wrap_y = identify == Identify::Both;
    if (wrap_x && nx < 3) || (wrap_y && ny < 3) {
        return Err(Error::InvalidParameter(
            "identified directions need at least 3 cells".into(),
        ));
    }
    let nxv = if wrap_x { nx } else { nx + 1 };
    let nyv = if wrap_y { ny } else { ny + 1 };
    let id = |i: usize, j: usize| (j % nyv) * nxv + (i % nxv);

    let mut vertices = Vec::with_capacity(nxv * nyv);
    for j in 0..nyv {
        for i in 0..nxv {
            vertices.push([
                i as f64 * width / nx as f64,
                j as f64 * height / ny as f64,
                0.0,
            ]);
        }
    }
    let mut triangles = Vec::with_capacity(2 * nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            let (a, b, c, d) = (id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
            triangles.push([a, b, c]);
            triangles.push([a, c, d]);
        }
    }
    let (tag, period) = match identify {
        Identify::None => (SurfaceTag::Rectangle, Period::default()),
        Identify::Horizontal => (
            SurfaceTag::Cylinder,
            Period {
                x: Some(width),
                y: None,
            },
        ),
        Identify::Both => (
            SurfaceTag::Torus,
            Period {
                x: Some(width),
                y: Some(height),
            },
        ),
    };
    SurfaceMesh::new(vertices, triangles, tag, period)
}

/// Unit disk: a hexagonal fan around the origin (vertex 0) with spokes at
/// 90° + 60°·j, refined `refinement` times. The boundary carries
/// `6·2^refinement` vertices on the unit circle, and the spokes remain
/// straight edge-paths at every level.
pub fn build_disk(refinement: usize) -> Result<SurfaceMesh> {
    let mut vertices: Vec<Vec3> = vec![[0.0, 0.0, 0.0]];
    for j in 0..6 {
        let a = PI / 2.0 + j as f64 * PI / 3.0;
        vertices.push([a.cos(), a.sin(), 0.0]);
    }
    let triangles = (0..6).map(|j| [0, 1 + j, 1 + (j + 1) % 6]).collect();
    let mut mesh = SurfaceMesh::new(vertices, triangles, SurfaceTag::Disk, Period::default())?;
    for _ in 0..refinement {
        mesh = refine(&mesh);
    }
    Ok(mesh)
}

/// [`build_disk`] followed by `rings` levels of graded refinement at the origin.
pub fn build_disk_graded(refinement: usize, rings: usize) -> Result<SurfaceMesh> {
    let mesh = build_disk(refinement)?;
    Ok(refine_graded(&mesh, &[0], rings).mesh)
}

/// Unit sphere from a hexagonal bipyramid: poles are vertices 0 (north) and
/// 1 (south), equatorial vertices sit at longitudes 60°·j. Meridians at 0°
/// and ±120° are edge-paths at every refinement level.
pub fn build_sphere(refinement: usize) -> Result<SurfaceMesh> {
    let mut vertices: Vec<Vec3> = vec![[0.0, 0.0, 1.0], [0.0, 0.0, -1.0]];
    for j in 0..6 {
        let a = j as f64 * PI / 3.0;
        vertices.push([a.cos(), a.sin(), 0.0]);
    }
    let mut triangles = Vec::with_capacity(12);
    for j in 0..6 {
        let (e0, e1) = (2 + j, 2 + (j + 1) % 6);
        triangles.push([0, e0, e1]);
        triangles.push([1, e1, e0]);
    }
    let mut mesh = SurfaceMesh::new(vertices, triangles, SurfaceTag::Sphere, Period::default())?;
    for _ in 0..refinement {
        mesh = refine(&mesh);
    }
    Ok(mesh)
}

/// Planar annulus `inner <= |x| <= outer` from an identified rectangle grid:
/// `n_theta` cells around, `n_r` cells across. Grid column `i` sits at angle
/// `2π·i/n_theta`, so radial segments at multiples of `2π/n_theta` are edge-paths.
pub fn build_annulus(inner: f64, outer: f64, n_theta: usize, n_r: usize) -> Result<SurfaceMesh> {
    check_length("inner radius", inner)?;
    check_length("outer radius", outer)?;
    if outer <= inner {
        return Err(Error::InvalidParameter(
            "outer radius must exceed inner radius".into(),
        ));
    }
    let grid = build_rectangle(1.0, 1.0, n_theta, n_r, Identify::Horizontal)?;
    // radius decreases with the chart y so the planar image keeps counter-clockwise orientation
    let vertices = grid
        .vertices()
        .iter()
        .map(|p| {
            let a = 2.0 * PI * p[0];
            let r = outer - p[1] * (outer - inner);
            [r * a.cos(), r * a.sin(), 0.0]
        })
        .collect();
    grid.with_vertices(vertices, SurfaceTag::Cylinder, Period::default())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_manifold_counts(m: &SurfaceMesh) {
        for e in 0..m.num_edges() {
            let [t0, t1] = m.edge_triangles(e);
            assert_ne!(t0, super::super::NO_TRIANGLE);
            if m.is_boundary_edge(e) {
                assert_eq!(t1, super::super::NO_TRIANGLE);
            } else {
                assert_ne!(t0, t1);
            }
        }
    }

    #[test]
    fn rectangle_counts() {
        let m = build_rectangle(1.0, 1.0, 2, 2, Identify::None).unwrap();
        assert_eq!((m.num_vertices(), m.num_triangles()), (9, 8));
        assert_eq!(m.euler_characteristic(), 1);
        assert_eq!(m.tag(), SurfaceTag::Rectangle);
        assert_manifold_counts(&m);
    }

    #[test]
    fn torus_counts() {
        let m = build_rectangle(1.0, 1.0, 4, 4, Identify::Both).unwrap();
        assert_eq!((m.num_vertices(), m.num_triangles()), (16, 32));
        assert_eq!(m.euler_characteristic(), 0);
        assert!(!m.has_boundary());
        assert!((m.total_area() - 1.0).abs() < 1e-12);
        assert_manifold_counts(&m);
    }

    #[test]
    fn cylinder_boundary_loops() {
        let m = build_rectangle(1.0, 0.5, 64, 32, Identify::Horizontal).unwrap();
        let loops = m.boundary_loops();
        assert_eq!(loops.len(), 2);
        assert!(loops.iter().all(|l| l.len() == 64));
        assert_eq!(m.euler_characteristic(), 0);
        assert!((m.total_area() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn rectangle_rejects_bad_sizes() {
        assert!(build_rectangle(0.0, 1.0, 4, 4, Identify::None).is_err());
        assert!(build_rectangle(1.0, f64::NAN, 4, 4, Identify::None).is_err());
        assert!(build_rectangle(1.0, 1.0, 1, 4, Identify::None).is_err());
        assert!(build_rectangle(1.0, 1.0, 2, 4, Identify::Both).is_err());
    }

    #[test]
    fn disk_coarse_and_area() {
        let d0 = build_disk(0).unwrap();
        assert_eq!(d0.euler_characteristic(), 1);
        assert_eq!(d0.num_triangles(), 6);
        // inscribed regular polygon with 6·2^r sides
        for r in 0..5 {
            let d = build_disk(r).unwrap();
            let n = 6.0 * 2f64.powi(r as i32);
            let poly = 0.5 * n * (2.0 * PI / n).sin();
            let interior_loss = d.total_area() - poly;
            // interior triangles are flat, so the area equals the polygon exactly
            assert!(interior_loss.abs() < 1e-12, "r={r}: {interior_loss}");
            assert!(PI - d.total_area() < 2.0 * PI.powi(3) / (3.0 * n * n));
            assert_manifold_counts(&d);
        }
    }

    #[test]
    fn disk_origin_fan_is_even() {
        let d = build_disk(3).unwrap();
        assert_eq!(d.vertex(0), [0.0, 0.0, 0.0]);
        assert_eq!(d.vertex_fan(0).len() % 2, 0);
        for v in 0..d.num_vertices() {
            if d.is_boundary_vertex(v) {
                let p = d.vertex(v);
                assert!(((p[0] * p[0] + p[1] * p[1]).sqrt() - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn sphere_properties() {
        for r in 0..4 {
            let s = build_sphere(r).unwrap();
            assert_eq!(s.euler_characteristic(), 2);
            assert!(!s.has_boundary());
            assert_eq!(s.vertex_fan(0).len() % 6, 0);
            assert_eq!(s.vertex_fan(1).len() % 6, 0);
            for p in s.vertices() {
                assert!((super::super::norm(*p) - 1.0).abs() < 1e-12);
            }
        }
        let a4 = build_sphere(4).unwrap().total_area();
        let a5 = build_sphere(5).unwrap().total_area();
        assert!(a4 < a5 && a5 < 4.0 * PI);
        assert!((4.0 * PI - a5) < 0.3 * (4.0 * PI - a4));
    }

    #[test]
    fn annulus_is_planar_cylinder() {
        let a = build_annulus(1.0, 2.0, 32, 8).unwrap();
        assert_eq!(a.euler_characteristic(), 0);
        assert_eq!(a.boundary_loops().len(), 2);
        let exact = PI * 3.0;
        assert!((a.total_area() - exact).abs() < 0.02 * exact);
    }
}
