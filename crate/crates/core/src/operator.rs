//! Discrete partition Laplacian.
//!
//! Functions anti-continuous across a cut are represented with one degree
//! of freedom per free vertex and a ±1 sign per (triangle, corner): the sign
//! flips each time the fan around the vertex crosses a cut edge. Vertices on
//! ∂M and odd points of the cut are pinned to zero.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{dot, sub, SurfaceMesh, Vec3};
use crate::homology::Cut;
use crate::sparse::SparseSym;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PinReason {
    DirichletBoundary,
    OddPoint,
    /// Vertex touches a triangle outside a Dirichlet subdomain.
    SubdomainBoundary,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CornerDof {
    Pinned,
    Free { dof: usize, sign: i8 },
}

impl CornerDof {
    pub fn dof(self) -> Option<(usize, f64)> {
        match self {
            CornerDof::Pinned => None,
            CornerDof::Free { dof, sign } => Some((dof, sign as f64)),
        }
    }
}

/// Sign-gauged degrees of freedom on a mesh.
#[derive(Clone, Debug, PartialEq)]
pub struct DofMap {
    mesh_id: u64,
    corners: Vec<[CornerDof; 3]>,
    dof_vertex: Vec<usize>,
    pins: BTreeMap<usize, PinReason>,
}

impl DofMap {
    pub fn n_dofs(&self) -> usize {
        self.dof_vertex.len()
    }

    pub fn corner(&self, t: usize, c: usize) -> CornerDof {
        self.corners[t][c]
    }

    pub fn corners(&self, t: usize) -> [CornerDof; 3] {
        self.corners[t]
    }

    /// Mesh vertex carrying each dof.
    pub fn dof_vertex(&self, d: usize) -> usize {
        self.dof_vertex[d]
    }

    pub fn pin_reasons(&self) -> &BTreeMap<usize, PinReason> {
        &self.pins
    }

    pub fn is_pinned(&self, v: usize) -> bool {
        self.pins.contains_key(&v)
    }

    pub fn mesh_id(&self) -> u64 {
        self.mesh_id
    }

    pub fn check_mesh(&self, mesh: &SurfaceMesh) -> Result<()> {
        if mesh.fingerprint() == self.mesh_id && self.corners.len() == mesh.num_triangles() {
            Ok(())
        } else {
            Err(Error::MismatchedMesh)
        }
    }

    /// Value of the dof vector `x` seen from corner `c` of triangle `t`.
    pub fn corner_value(&self, x: &[f64], t: usize, c: usize) -> f64 {
        match self.corners[t][c] {
            CornerDof::Pinned => 0.0,
            CornerDof::Free { dof, sign } => sign as f64 * x[dof],
        }
    }

    /// Same space with the global sign of the flagged dofs reversed.
    pub fn with_sign_flips(&self, flip: &[bool]) -> DofMap {
        let mut out = self.clone();
        for tri in &mut out.corners {
            for c in tri.iter_mut() {
                if let CornerDof::Free { dof, sign } = c {
                    if flip[*dof] {
                        *sign = -*sign;
                    }
                }
            }
        }
        out
    }

    /// Diagonal ±1 relating `self` to `other` when both describe the same
    /// space with the same dof numbering; `None` otherwise.
    pub fn gauge_relative_to(&self, other: &DofMap) -> Option<Vec<f64>> {
        if self.n_dofs() != other.n_dofs() || self.corners.len() != other.corners.len() {
            return None;
        }
        let mut d = vec![0.0; self.n_dofs()];
        for (a, b) in self.corners.iter().zip(&other.corners) {
            for c in 0..3 {
                match (a[c], b[c]) {
                    (CornerDof::Pinned, CornerDof::Pinned) => {}
                    (CornerDof::Free { dof: i, sign: s }, CornerDof::Free { dof: j, sign: r })
                        if i == j =>
                    {
                        let v = (s * r) as f64;
                        if d[i] != 0.0 && d[i] != v {
                            return None;
                        }
                        d[i] = v;
                    }
                    _ => return None,
                }
            }
        }
        Some(d)
    }
}

fn assign_free(
    mesh: &SurfaceMesh,
    v: usize,
    dof: usize,
    cut: Option<&Cut>,
    corners: &mut [[CornerDof; 3]],
) {
    let fan = mesh.vertex_fan(v);
    let corner = |t: usize| mesh.triangle(t).iter().position(|&x| x == v).unwrap();
    let mut signs = Vec::with_capacity(fan.len());
    let mut s: i8 = 1;
    for (i, &t) in fan.iter().enumerate() {
        signs.push(s);
        if i + 1 < fan.len() {
            let e = mesh.triangle_edges(t)[corner(t)];
            if cut.is_some_and(|c| c.contains(e)) {
                s = -s;
            }
        }
    }
    // the sector containing the lowest-numbered triangle is positive
    let (k, _) = fan.iter().enumerate().min_by_key(|&(_, &t)| t).unwrap();
    let flip = signs[k];
    for (&t, &s) in fan.iter().zip(&signs) {
        corners[t][corner(t)] = CornerDof::Free {
            dof,
            sign: s * flip,
        };
    }
}

/// Degrees of freedom for functions anti-continuous across `cut`.
pub fn build_dof_map(mesh: &SurfaceMesh, cut: &Cut) -> Result<DofMap> {
    if !cut.belongs_to(mesh) {
        return Err(Error::MismatchedMesh);
    }
    let deg = cut.vertex_degrees(mesh);
    let mut corners = vec![[CornerDof::Pinned; 3]; mesh.num_triangles()];
    let mut dof_vertex = Vec::new();
    let mut pins = BTreeMap::new();
    for v in 0..mesh.num_vertices() {
        if mesh.is_boundary_vertex(v) {
            pins.insert(v, PinReason::DirichletBoundary);
        } else if deg[v] % 2 == 1 {
            pins.insert(v, PinReason::OddPoint);
        } else {
            assign_free(mesh, v, dof_vertex.len(), Some(cut), &mut corners);
            dof_vertex.push(v);
        }
    }
    Ok(DofMap {
        mesh_id: mesh.fingerprint(),
        corners,
        dof_vertex,
        pins,
    })
}

/// Dirichlet dofs of a triangle subdomain: vertices whose whole star lies
/// in the subdomain and which are not on ∂M.
pub fn build_subdomain_dof_map(mesh: &SurfaceMesh, subdomain: &[usize]) -> Result<DofMap> {
    if subdomain.is_empty() {
        return Err(Error::EmptySubdomain);
    }
    let mut inside = vec![false; mesh.num_triangles()];
    for &t in subdomain {
        if t >= mesh.num_triangles() {
            return Err(Error::OutOfRange(format!("triangle id {t}")));
        }
        inside[t] = true;
    }
    let comps = mesh.dual_components(subdomain).len();
    if comps != 1 {
        return Err(Error::DisconnectedSubdomain(comps));
    }
    let mut corners = vec![[CornerDof::Pinned; 3]; mesh.num_triangles()];
    let mut dof_vertex = Vec::new();
    let mut pins = BTreeMap::new();
    let mut touched = vec![false; mesh.num_vertices()];
    for &t in subdomain {
        for v in mesh.triangle(t) {
            touched[v] = true;
        }
    }
    for v in 0..mesh.num_vertices() {
        if !touched[v] {
            continue;
        }
        if mesh.is_boundary_vertex(v) {
            pins.insert(v, PinReason::DirichletBoundary);
        } else if mesh.vertex_fan(v).iter().any(|&t| !inside[t]) {
            pins.insert(v, PinReason::SubdomainBoundary);
        } else {
            assign_free(mesh, v, dof_vertex.len(), None, &mut corners);
            dof_vertex.push(v);
        }
    }
    Ok(DofMap {
        mesh_id: mesh.fingerprint(),
        corners,
        dof_vertex,
        pins,
    })
}

/// P1 stiffness on a flat triangle: `k_ij = (e_i·e_j)/(4A)` with `e_i` the
/// edge opposite corner `i`.
pub fn element_stiffness(p: [Vec3; 3]) -> [[f64; 3]; 3] {
    let e = [sub(p[2], p[1]), sub(p[0], p[2]), sub(p[1], p[0])];
    let area = 0.5 * crate::geometry::norm(crate::geometry::cross(e[2], sub(p[2], p[0])));
    let mut k = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            k[i][j] = dot(e[i], e[j]) / (4.0 * area);
        }
    }
    k
}

/// Consistent P1 mass: `A/12 · [[2,1,1],[1,2,1],[1,1,2]]`.
pub fn element_mass(area: f64) -> [[f64; 3]; 3] {
    let mut m = [[area / 12.0; 3]; 3];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = area / 6.0;
    }
    m
}

fn assemble(
    mesh: &SurfaceMesh,
    dofs: &DofMap,
    element: impl Fn(usize) -> [[f64; 3]; 3],
) -> Result<SparseSym> {
    dofs.check_mesh(mesh)?;
    let mut triplets = Vec::new();
    for t in 0..mesh.num_triangles() {
        let cs = dofs.corners(t);
        if cs.iter().all(|c| *c == CornerDof::Pinned) {
            continue;
        }
        let a = mesh.triangle_area(t);
        if !(a > 0.0) {
            return Err(Error::DegenerateTriangle(t, a));
        }
        let ke = element(t);
        for i in 0..3 {
            let Some((di, si)) = cs[i].dof() else {
                continue;
            };
            for j in 0..3 {
                let Some((dj, sj)) = cs[j].dof() else {
                    continue;
                };
                triplets.push((di, dj, si * sj * ke[i][j]));
            }
        }
    }
    Ok(SparseSym::from_triplets(dofs.n_dofs(), triplets))
}

pub fn assemble_stiffness(mesh: &SurfaceMesh, dofs: &DofMap) -> Result<SparseSym> {
    assemble(mesh, dofs, |t| element_stiffness(mesh.corner_positions(t)))
}

pub fn assemble_mass(mesh: &SurfaceMesh, dofs: &DofMap) -> Result<SparseSym> {
    assemble(mesh, dofs, |t| element_mass(mesh.triangle_area(t)))
}

/// Stiffness and mass of the partition Laplacian for `cut`.
pub fn assemble_cut_operator(
    mesh: &SurfaceMesh,
    cut: &Cut,
) -> Result<(SparseSym, SparseSym, DofMap)> {
    let dofs = build_dof_map(mesh, cut)?;
    Ok((
        assemble_stiffness(mesh, &dofs)?,
        assemble_mass(mesh, &dofs)?,
        dofs,
    ))
}

/// Dirichlet Laplacian of a triangle subdomain.
pub fn assemble_dirichlet(
    mesh: &SurfaceMesh,
    subdomain: &[usize],
) -> Result<(SparseSym, SparseSym, DofMap)> {
    let dofs = build_subdomain_dof_map(mesh, subdomain)?;
    Ok((
        assemble_stiffness(mesh, &dofs)?,
        assemble_mass(mesh, &dofs)?,
        dofs,
    ))
}

/// Assembly with no pinning at all (closed surfaces, or Neumann data for tests).
pub fn assemble_unconstrained(mesh: &SurfaceMesh) -> (SparseSym, SparseSym) {
    let mut corners = vec![[CornerDof::Pinned; 3]; mesh.num_triangles()];
    for t in 0..mesh.num_triangles() {
        for (c, v) in mesh.triangle(t).into_iter().enumerate() {
            corners[t][c] = CornerDof::Free { dof: v, sign: 1 };
        }
    }
    let dofs = DofMap {
        mesh_id: mesh.fingerprint(),
        corners,
        dof_vertex: (0..mesh.num_vertices()).collect(),
        pins: BTreeMap::new(),
    };
    (
        assemble_stiffness(mesh, &dofs).expect("valid mesh"),
        assemble_mass(mesh, &dofs).expect("valid mesh"),
    )
}
