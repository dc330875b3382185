//! Triangulated surfaces.
//!
//! A [`SurfaceMesh`] is an oriented, manifold triangle mesh, possibly with
//! boundary. Flat tori and cylinders are stored in chart coordinates with a
//! [`Period`]; element geometry is then computed by unwrapping each triangle
//! around its first corner, so the intrinsic metric is exactly flat.

mod builders;
mod io;
mod refine;
mod snap;

pub use builders::{
    build_annulus, build_disk, build_disk_graded, build_rectangle, build_sphere, Identify,
};
pub use io::{read_mesh, write_mesh};
pub use refine::{refine, refine_graded, refine_with_map, EdgeLift, Refinement};
pub use snap::{snap_curve, EdgePath};

use std::collections::hash_map::DefaultHasher;
use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Vec3 = [f64; 3];

/// Marker for "no second triangle" on a boundary edge.
pub const NO_TRIANGLE: usize = usize::MAX;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SurfaceTag {
    Disk,
    Sphere,
    Torus,
    Cylinder,
    Rectangle,
    Custom,
}

impl SurfaceTag {
    pub fn as_str(self) -> &'static str {
        match self {
            SurfaceTag::Disk => "disk",
            SurfaceTag::Sphere => "sphere",
            SurfaceTag::Torus => "torus",
            SurfaceTag::Cylinder => "cylinder",
            SurfaceTag::Rectangle => "rectangle",
            SurfaceTag::Custom => "custom",
        }
    }

    /// Euler characteristic implied by the tag, if any.
    pub fn expected_euler(self) -> Option<i64> {
        match self {
            SurfaceTag::Disk | SurfaceTag::Rectangle => Some(1),
            SurfaceTag::Sphere => Some(2),
            SurfaceTag::Torus | SurfaceTag::Cylinder => Some(0),
            SurfaceTag::Custom => None,
        }
    }
}

impl fmt::Display for SurfaceTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SurfaceTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "disk" => SurfaceTag::Disk,
            "sphere" => SurfaceTag::Sphere,
            "torus" => SurfaceTag::Torus,
            "cylinder" => SurfaceTag::Cylinder,
            "rectangle" => SurfaceTag::Rectangle,
            "custom" => SurfaceTag::Custom,
            other => {
                return Err(Error::InvalidParameter(format!(
                    "unknown surface tag `{other}`"
                )))
            }
        })
    }
}

/// Chart periods of an identified rectangle. `None` means the direction is not identified.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Period {
    pub x: Option<f64>,
    pub y: Option<f64>,
}

impl Period {
    pub fn is_periodic(&self) -> bool {
        self.x.is_some() || self.y.is_some()
    }

    /// Shortest representative of a chart displacement.
    pub fn unwrap_delta(&self, mut d: Vec3) -> Vec3 {
        if let Some(px) = self.x {
            d[0] -= px * (d[0] / px).round();
        }
        if let Some(py) = self.y {
            d[1] -= py * (d[1] / py).round();
        }
        d
    }

    /// Reduce a chart position into the fundamental domain `[0, p)`.
    pub fn wrap(&self, mut p: Vec3) -> Vec3 {
        if let Some(px) = self.x {
            p[0] = p[0].rem_euclid(px);
            if (px - p[0]).abs() < 1e-12 * px {
                p[0] = 0.0;
            }
        }
        if let Some(py) = self.y {
            p[1] = p[1].rem_euclid(py);
            if (py - p[1]).abs() < 1e-12 * py {
                p[1] = 0.0;
            }
        }
        p
    }
}

/// Oriented manifold triangle mesh with optional boundary.
#[derive(Clone, Debug)]
pub struct SurfaceMesh {
    vertices: Vec<Vec3>,
    triangles: Vec<[usize; 3]>,
    edges: Vec<[usize; 2]>,
    edge_tris: Vec<[usize; 2]>,
    tri_edges: Vec<[usize; 3]>,
    edge_lookup: HashMap<(usize, usize), usize>,
    boundary_vertex: Vec<bool>,
    vertex_tris: Vec<Vec<usize>>,
    tag: SurfaceTag,
    period: Period,
    fingerprint: u64,
}

impl SurfaceMesh {
    /// Build and validate a mesh. Rejects non-manifold input, inconsistent
    /// orientation, and zero-area triangles.
    pub fn new(
        vertices: Vec<Vec3>,
        triangles: Vec<[usize; 3]>,
        tag: SurfaceTag,
        period: Period,
    ) -> Result<Self> {
        let nv = vertices.len();
        if triangles.is_empty() {
            return Err(Error::NonManifold("mesh has no triangles".into()));
        }
        for (t, tri) in triangles.iter().enumerate() {
            if tri.iter().any(|&v| v >= nv) {
                return Err(Error::NonManifold(format!(
                    "triangle {t} references a missing vertex"
                )));
            }
            if tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2] {
                return Err(Error::NonManifold(format!("triangle {t} repeats a vertex")));
            }
        }

        let mut edges = Vec::new();
        let mut edge_tris: Vec<[usize; 2]> = Vec::new();
        // orientation bookkeeping: +1 if first triangle traverses a->b with a<b
        let mut edge_dir: Vec<[i8; 2]> = Vec::new();
        let mut edge_lookup = HashMap::with_capacity(triangles.len() * 3 / 2 + 8);
        let mut tri_edges = vec![[0usize; 3]; triangles.len()];
        for (t, tri) in triangles.iter().enumerate() {
            for k in 0..3 {
                let (a, b) = (tri[k], tri[(k + 1) % 3]);
                let key = (a.min(b), a.max(b));
                let dir = if a < b { 1 } else { -1 };
                let e = *edge_lookup.entry(key).or_insert_with(|| {
                    edges.push([key.0, key.1]);
                    edge_tris.push([NO_TRIANGLE, NO_TRIANGLE]);
                    edge_dir.push([0, 0]);
                    edges.len() - 1
                });
                if edge_tris[e][0] == NO_TRIANGLE {
                    edge_tris[e][0] = t;
                    edge_dir[e][0] = dir;
                } else if edge_tris[e][1] == NO_TRIANGLE {
                    edge_tris[e][1] = t;
                    edge_dir[e][1] = dir;
                } else {
                    return Err(Error::NonManifold(format!(
                        "edge ({}, {}) has more than two incident triangles",
                        key.0, key.1
                    )));
                }
                tri_edges[t][k] = e;
            }
        }
        for (e, d) in edge_dir.iter().enumerate() {
            if edge_tris[e][1] != NO_TRIANGLE && d[0] == d[1] {
                return Err(Error::NonManifold(format!(
                    "inconsistent orientation across edge ({}, {})",
                    edges[e][0], edges[e][1]
                )));
            }
        }

        let mut vertex_tris = vec![Vec::new(); nv];
        for (t, tri) in triangles.iter().enumerate() {
            for &v in tri {
                vertex_tris[v].push(t);
            }
        }
        let mut boundary_vertex = vec![false; nv];
        for (e, et) in edge_tris.iter().enumerate() {
            if et[1] == NO_TRIANGLE {
                boundary_vertex[edges[e][0]] = true;
                boundary_vertex[edges[e][1]] = true;
            }
        }

        let mut hasher = DefaultHasher::new();
        nv.hash(&mut hasher);
        triangles.hash(&mut hasher);
        let fingerprint = hasher.finish();

        let mut mesh = SurfaceMesh {
            vertices,
            triangles,
            edges,
            edge_tris,
            tri_edges,
            edge_lookup,
            boundary_vertex,
            vertex_tris,
            tag,
            period,
            fingerprint,
        };
        for v in 0..nv {
            if mesh.vertex_tris[v].is_empty() {
                return Err(Error::NonManifold(format!("vertex {v} is isolated")));
            }
            let fan = mesh.walk_fan(v)?;
            mesh.vertex_tris[v] = fan;
        }
        for t in 0..mesh.triangles.len() {
            let a = mesh.triangle_area(t);
            if !(a > 0.0) || !a.is_finite() {
                return Err(Error::DegenerateTriangle(t, a));
            }
        }
        Ok(mesh)
    }

    /// Order the triangles around `v` by rotation; fails unless the star of
    /// `v` is a single disk or half-disk.
    fn walk_fan(&self, v: usize) -> Result<Vec<usize>> {
        let tris = &self.vertex_tris[v];
        // For triangle t at corner c: "next" edge joins v to corner c+1, "prev" to c+2.
        let corner = |t: usize| self.triangles[t].iter().position(|&x| x == v).unwrap();
        let mut start = tris[0];
        let mut is_boundary = false;
        for &t in tris {
            let c = corner(t);
            let prev_edge = self.tri_edges[t][(c + 2) % 3];
            if self.edge_tris[prev_edge][1] == NO_TRIANGLE {
                if is_boundary {
                    return Err(Error::NonManifold(format!(
                        "vertex {v} touches more than one boundary chain"
                    )));
                }
                is_boundary = true;
                start = t;
            }
        }
        let mut fan = Vec::with_capacity(tris.len());
        let mut t = start;
        loop {
            fan.push(t);
            let c = corner(t);
            let next_edge = self.tri_edges[t][c];
            let nt = self.other_triangle(next_edge, t);
            if nt == NO_TRIANGLE || nt == start {
                break;
            }
            if fan.len() > tris.len() {
                break;
            }
            t = nt;
        }
        if fan.len() != tris.len() {
            return Err(Error::NonManifold(format!(
                "star of vertex {v} is not a single fan ({} of {} triangles reached)",
                fan.len(),
                tris.len()
            )));
        }
        Ok(fan)
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn num_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn vertices(&self) -> &[Vec3] {
        &self.vertices
    }

    pub fn vertex(&self, v: usize) -> Vec3 {
        self.vertices[v]
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn triangle(&self, t: usize) -> [usize; 3] {
        self.triangles[t]
    }

    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }

    /// Endpoints of edge `e`, smaller id first.
    pub fn edge(&self, e: usize) -> [usize; 2] {
        self.edges[e]
    }

    /// Incident triangles of `e`; the second is [`NO_TRIANGLE`] on the boundary.
    pub fn edge_triangles(&self, e: usize) -> [usize; 2] {
        self.edge_tris[e]
    }

    /// Edge ids of triangle `t`; entry `k` joins corners `k` and `k+1`.
    pub fn triangle_edges(&self, t: usize) -> [usize; 3] {
        self.tri_edges[t]
    }

    pub fn edge_between(&self, a: usize, b: usize) -> Option<usize> {
        self.edge_lookup.get(&(a.min(b), a.max(b))).copied()
    }

    pub fn other_triangle(&self, e: usize, t: usize) -> usize {
        let [t0, t1] = self.edge_tris[e];
        if t0 == t {
            t1
        } else {
            t0
        }
    }

    pub fn is_boundary_edge(&self, e: usize) -> bool {
        self.edge_tris[e][1] == NO_TRIANGLE
    }

    pub fn is_boundary_vertex(&self, v: usize) -> bool {
        self.boundary_vertex[v]
    }

    pub fn has_boundary(&self) -> bool {
        self.boundary_vertex.iter().any(|&b| b)
    }

    /// Triangles around `v` in rotational order; consecutive entries share an
    /// edge incident to `v`. For boundary vertices the fan runs from one
    /// boundary edge to the other.
    pub fn vertex_fan(&self, v: usize) -> &[usize] {
        &self.vertex_tris[v]
    }

    pub fn tag(&self) -> SurfaceTag {
        self.tag
    }

    pub fn period(&self) -> Period {
        self.period
    }

    /// Identity of the triangulation; objects built on one mesh carry it.
    pub fn fingerprint(&self) -> u64 {
        self.fingerprint
    }

    /// True if boundary vertices sit on origin-centred circles (disk, annulus).
    pub(crate) fn has_circular_boundary(&self) -> bool {
        match self.tag {
            SurfaceTag::Disk => true,
            SurfaceTag::Cylinder => !self.period.is_periodic(),
            _ => false,
        }
    }

    /// Corner positions of `t`, unwrapped around the first corner on periodic charts.
    pub fn corner_positions(&self, t: usize) -> [Vec3; 3] {
        let [a, b, c] = self.triangles[t];
        let pa = self.vertices[a];
        if !self.period.is_periodic() {
            return [pa, self.vertices[b], self.vertices[c]];
        }
        let lift = |q: Vec3| add(pa, self.period.unwrap_delta(sub(q, pa)));
        [pa, lift(self.vertices[b]), lift(self.vertices[c])]
    }

    pub fn triangle_area(&self, t: usize) -> f64 {
        let [p0, p1, p2] = self.corner_positions(t);
        0.5 * norm(cross(sub(p1, p0), sub(p2, p0)))
    }

    pub fn triangle_centroid(&self, t: usize) -> Vec3 {
        let [p0, p1, p2] = self.corner_positions(t);
        let c = [
            (p0[0] + p1[0] + p2[0]) / 3.0,
            (p0[1] + p1[1] + p2[1]) / 3.0,
            (p0[2] + p1[2] + p2[2]) / 3.0,
        ];
        if self.period.is_periodic() {
            self.period.wrap(c)
        } else {
            c
        }
    }

    pub fn total_area(&self) -> f64 {
        (0..self.num_triangles())
            .map(|t| self.triangle_area(t))
            .sum()
    }

    /// Displacement from `a` to `b`, shortest representative on periodic charts.
    pub fn displacement(&self, a: Vec3, b: Vec3) -> Vec3 {
        self.period.unwrap_delta(sub(b, a))
    }

    pub fn edge_length(&self, e: usize) -> f64 {
        let [a, b] = self.edges[e];
        norm(self.displacement(self.vertices[a], self.vertices[b]))
    }

    pub fn mean_edge_length(&self) -> f64 {
        (0..self.num_edges())
            .map(|e| self.edge_length(e))
            .sum::<f64>()
            / self.num_edges() as f64
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.num_vertices() as i64 - self.num_edges() as i64 + self.num_triangles() as i64
    }

    pub fn num_boundary_edges(&self) -> usize {
        (0..self.num_edges())
            .filter(|&e| self.is_boundary_edge(e))
            .count()
    }

    /// Boundary edges grouped into closed loops.
    pub fn boundary_loops(&self) -> Vec<Vec<usize>> {
        let mut by_vertex: HashMap<usize, Vec<usize>> = HashMap::new();
        for e in 0..self.num_edges() {
            if self.is_boundary_edge(e) {
                for v in self.edges[e] {
                    by_vertex.entry(v).or_default().push(e);
                }
            }
        }
        let mut seen = vec![false; self.num_edges()];
        let mut loops = Vec::new();
        for e0 in 0..self.num_edges() {
            if !self.is_boundary_edge(e0) || seen[e0] {
                continue;
            }
            let mut lp = vec![e0];
            seen[e0] = true;
            let mut v = self.edges[e0][1];
            loop {
                let next = by_vertex[&v].iter().copied().find(|&e| !seen[e]);
                match next {
                    Some(e) => {
                        seen[e] = true;
                        lp.push(e);
                        let [a, b] = self.edges[e];
                        v = if a == v { b } else { a };
                    }
                    None => break,
                }
            }
            loops.push(lp);
        }
        loops
    }

    /// Dual-graph components of a triangle subset (adjacency through interior edges).
    pub fn dual_components(&self, tris: &[usize]) -> Vec<Vec<usize>> {
        let mut member = vec![false; self.num_triangles()];
        for &t in tris {
            member[t] = true;
        }
        let mut seen = vec![false; self.num_triangles()];
        let mut comps = Vec::new();
        for &t0 in tris {
            if seen[t0] {
                continue;
            }
            seen[t0] = true;
            let mut comp = vec![t0];
            let mut i = 0;
            while i < comp.len() {
                let t = comp[i];
                i += 1;
                for e in self.tri_edges[t] {
                    let n = self.other_triangle(e, t);
                    if n != NO_TRIANGLE && member[n] && !seen[n] {
                        seen[n] = true;
                        comp.push(n);
                    }
                }
            }
            comps.push(comp);
        }
        comps
    }

    /// Index of the vertex nearest to `p` (periodic-aware).
    pub fn nearest_vertex(&self, p: Vec3) -> usize {
        let mut best = (f64::INFINITY, 0);
        for (i, &q) in self.vertices.iter().enumerate() {
            let d = norm(self.displacement(p, q));
            if d < best.0 {
                best = (d, i);
            }
        }
        best.1
    }

    pub(crate) fn with_vertices(
        &self,
        vertices: Vec<Vec3>,
        tag: SurfaceTag,
        period: Period,
    ) -> Result<Self> {
        SurfaceMesh::new(vertices, self.triangles.clone(), tag, period)
    }
}

pub(crate) fn sub(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub(crate) fn add(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

pub(crate) fn dot(a: Vec3, b: Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub(crate) fn cross(a: Vec3, b: Vec3) -> Vec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub(crate) fn norm(a: Vec3) -> f64 {
    dot(a, a).sqrt()
}

pub(crate) fn scale(a: Vec3, s: f64) -> Vec3 {
    [a[0] * s, a[1] * s, a[2] * s]
}
