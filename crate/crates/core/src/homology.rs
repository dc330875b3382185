//! Z₂ homology of cuts.
//!
//! A [`Cut`] is a 1-chain of interior edges. Chains in ∂M are quotiented
//! out throughout, so every query here is about relative homology
//! H₁(M, ∂M; Z₂).

use std::collections::{BTreeSet, VecDeque};
use std::io::{BufRead, BufReader, Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{EdgePath, Refinement, SurfaceMesh, NO_TRIANGLE};
use crate::gf2::Gf2System;

/// Set of interior edges of one mesh.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Cut {
    mesh_id: u64,
    edges: BTreeSet<usize>,
}

impl Cut {
    pub fn new(mesh: &SurfaceMesh, edges: impl IntoIterator<Item = usize>) -> Result<Self> {
        let edges: BTreeSet<usize> = edges.into_iter().collect();
        for &e in &edges {
            if e >= mesh.num_edges() {
                return Err(Error::OutOfRange(format!(
                    "edge id {e} (mesh has {})",
                    mesh.num_edges()
                )));
            }
            if mesh.is_boundary_edge(e) {
                return Err(Error::BoundaryEdgeInCut(e));
            }
        }
        Ok(Cut {
            mesh_id: mesh.fingerprint(),
            edges,
        })
    }

    pub fn empty(mesh: &SurfaceMesh) -> Self {
        Cut {
            mesh_id: mesh.fingerprint(),
            edges: BTreeSet::new(),
        }
    }

    /// Sum of edge paths as a Z₂ chain. Boundary edges along a path are dropped.
    pub fn from_paths<'a>(
        mesh: &SurfaceMesh,
        paths: impl IntoIterator<Item = &'a EdgePath>,
    ) -> Self {
        let mut edges = BTreeSet::new();
        for p in paths {
            for e in p.edge_chain() {
                if mesh.is_boundary_edge(e) {
                    continue;
                }
                if !edges.remove(&e) {
                    edges.insert(e);
                }
            }
        }
        Cut {
            mesh_id: mesh.fingerprint(),
            edges,
        }
    }

    /// Build from vertex pairs; every pair must be an interior edge.
    pub fn from_vertex_pairs(mesh: &SurfaceMesh, pairs: &[[usize; 2]]) -> Result<Self> {
        let edges = pairs
            .iter()
            .map(|&[u, v]| mesh.edge_between(u, v).ok_or(Error::NotAnEdge(u, v)))
            .collect::<Result<Vec<_>>>()?;
        Cut::new(mesh, edges)
    }

    pub fn edges(&self) -> &BTreeSet<usize> {
        &self.edges
    }

    pub fn contains(&self, e: usize) -> bool {
        self.edges.contains(&e)
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn mesh_id(&self) -> u64 {
        self.mesh_id
    }

    pub fn belongs_to(&self, mesh: &SurfaceMesh) -> bool {
        self.mesh_id == mesh.fingerprint()
    }

    pub(crate) fn check_mesh(&self, mesh: &SurfaceMesh) -> Result<()> {
        if self.belongs_to(mesh) {
            Ok(())
        } else {
            Err(Error::MismatchedMesh)
        }
    }

    pub fn symmetric_difference(&self, other: &Cut) -> Result<Cut> {
        if self.mesh_id != other.mesh_id {
            return Err(Error::MismatchedMesh);
        }
        Ok(Cut {
            mesh_id: self.mesh_id,
            edges: self
                .edges
                .symmetric_difference(&other.edges)
                .copied()
                .collect(),
        })
    }

    /// Carry the cut to a refined mesh, each edge to its child edges.
    pub fn lift(&self, refinement: &Refinement) -> Result<Cut> {
        if refinement.edge_lift.num_parent_edges() <= self.edges.iter().copied().max().unwrap_or(0)
        {
            return Err(Error::MismatchedMesh);
        }
        Ok(Cut {
            mesh_id: refinement.mesh.fingerprint(),
            edges: refinement.edge_lift.lift(&self.edges),
        })
    }

    /// Number of cut edges at every vertex.
    pub fn vertex_degrees(&self, mesh: &SurfaceMesh) -> Vec<usize> {
        let mut deg = vec![0; mesh.num_vertices()];
        for &e in &self.edges {
            for v in mesh.edge(e) {
                deg[v] += 1;
            }
        }
        deg
    }
}

/// Z₂ 2-chain.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Chain2 {
    pub triangles: BTreeSet<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

/// Plus/minus color of every triangle.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TriangleColoring {
    pub colors: Vec<Sign>,
}

impl TriangleColoring {
    pub fn constant(mesh: &SurfaceMesh) -> Self {
        TriangleColoring {
            colors: vec![Sign::Plus; mesh.num_triangles()],
        }
    }

    /// Color `minus` exactly on the given 2-chain.
    pub fn from_chain(mesh: &SurfaceMesh, chain: &Chain2) -> Self {
        let mut c = Self::constant(mesh);
        for &t in &chain.triangles {
            c.colors[t] = Sign::Minus;
        }
        c
    }

    pub fn minus_triangles(&self) -> Chain2 {
        Chain2 {
            triangles: (0..self.colors.len())
                .filter(|&t| self.colors[t] == Sign::Minus)
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    Chain { triangles: Vec<usize> },
    Coloring { minus_triangles: Vec<usize> },
}

/// Verdict of a homology query with a checkable witness when positive.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomologyCertificate {
    pub verdict: bool,
    pub witness: Option<Witness>,
    pub obstruction_note: Option<String>,
}

impl HomologyCertificate {
    fn no(note: impl Into<String>) -> Self {
        HomologyCertificate {
            verdict: false,
            witness: None,
            obstruction_note: Some(note.into()),
        }
    }

    pub fn chain(&self) -> Option<Chain2> {
        match &self.witness {
            Some(Witness::Chain { triangles }) => Some(Chain2 {
                triangles: triangles.iter().copied().collect(),
            }),
            _ => None,
        }
    }

    pub fn coloring(&self, mesh: &SurfaceMesh) -> Option<TriangleColoring> {
        match &self.witness {
            Some(Witness::Coloring { minus_triangles }) => Some(TriangleColoring::from_chain(
                mesh,
                &Chain2 {
                    triangles: minus_triangles.iter().copied().collect(),
                },
            )),
            Some(Witness::Chain { triangles }) => Some(TriangleColoring::from_chain(
                mesh,
                &Chain2 {
                    triangles: triangles.iter().copied().collect(),
                },
            )),
            None => None,
        }
    }
}

/// Column-sparse Z₂ matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Z2Matrix {
    pub nrows: usize,
    pub columns: Vec<Vec<usize>>,
}

impl Z2Matrix {
    pub fn ncols(&self) -> usize {
        self.columns.len()
    }

    pub fn apply(&self, x: &[bool]) -> Vec<bool> {
        let mut y = vec![false; self.nrows];
        for (c, col) in self.columns.iter().enumerate() {
            if x[c] {
                for &r in col {
                    y[r] ^= true;
                }
            }
        }
        y
    }

    /// `self · other`, entries mod 2.
    pub fn compose(&self, other: &Z2Matrix) -> Z2Matrix {
        let columns = other
            .columns
            .iter()
            .map(|col| {
                let mut acc = BTreeSet::new();
                for &k in col {
                    for &r in &self.columns[k] {
                        if !acc.remove(&r) {
                            acc.insert(r);
                        }
                    }
                }
                acc.into_iter().collect()
            })
            .collect();
        Z2Matrix {
            nrows: self.nrows,
            columns,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.columns.iter().all(Vec::is_empty)
    }

    pub fn rank(&self) -> usize {
        let mut s = Gf2System::new(self.nrows);
        for col in &self.columns {
            s.push_row(col.iter().copied(), false);
        }
        s.rank()
    }
}

/// Absolute boundary map ∂₁ (edges → vertices) or ∂₂ (triangles → edges).
pub fn boundary_matrix(mesh: &SurfaceMesh, dim: usize) -> Result<Z2Matrix> {
    match dim {
        1 => Ok(Z2Matrix {
            nrows: mesh.num_vertices(),
            columns: mesh.edges().iter().map(|e| e.to_vec()).collect(),
        }),
        2 => Ok(Z2Matrix {
            nrows: mesh.num_edges(),
            columns: (0..mesh.num_triangles())
                .map(|t| mesh.triangle_edges(t).to_vec())
                .collect(),
        }),
        d => Err(Error::InvalidParameter(format!(
            "boundary dimension must be 1 or 2, got {d}"
        ))),
    }
}

/// Interior vertices where an odd number of cut edges meet.
pub fn odd_points(mesh: &SurfaceMesh, cut: &Cut) -> Result<BTreeSet<usize>> {
    cut.check_mesh(mesh)?;
    Ok(cut
        .vertex_degrees(mesh)
        .iter()
        .enumerate()
        .filter(|&(v, &d)| d % 2 == 1 && !mesh.is_boundary_vertex(v))
        .map(|(v, _)| v)
        .collect())
}

/// Whether `cut1 + cut2` is a relative cycle, i.e. the odd sets agree.
pub fn is_relative_cycle(mesh: &SurfaceMesh, cut1: &Cut, cut2: &Cut) -> Result<bool> {
    Ok(odd_points(mesh, cut1)? == odd_points(mesh, cut2)?)
}

fn interior_edges(mesh: &SurfaceMesh) -> impl Iterator<Item = usize> + '_ {
    (0..mesh.num_edges()).filter(|&e| !mesh.is_boundary_edge(e))
}

/// Solve ∂₂ω ≡ cut modulo edges of ∂M.
pub fn null_homologous(mesh: &SurfaceMesh, cut: &Cut) -> Result<HomologyCertificate> {
    if !odd_points(mesh, cut)?.is_empty() {
        return Ok(HomologyCertificate::no(
            "not a relative cycle: the cut has odd points",
        ));
    }
    let mut sys = Gf2System::new(mesh.num_triangles());
    for e in interior_edges(mesh) {
        sys.push_row(mesh.edge_triangles(e), cut.contains(e));
    }
    Ok(match sys.solve() {
        Some(x) => {
            let triangles: Vec<usize> = (0..x.len()).filter(|&t| x[t]).collect();
            HomologyCertificate {
                verdict: true,
                witness: Some(Witness::Chain { triangles }),
                obstruction_note: None,
            }
        }
        None => HomologyCertificate::no("∂₂ω = cut has no solution modulo ∂M"),
    })
}

/// Dual-graph 2-coloring that flips exactly across cut edges.
pub fn two_coloring(mesh: &SurfaceMesh, cut: &Cut) -> Result<HomologyCertificate> {
    if !odd_points(mesh, cut)?.is_empty() {
        return Ok(HomologyCertificate::no(
            "not a relative cycle: the cut has odd points",
        ));
    }
    let nt = mesh.num_triangles();
    let mut color: Vec<Option<Sign>> = vec![None; nt];
    let mut queue = VecDeque::new();
    for t0 in 0..nt {
        if color[t0].is_some() {
            continue;
        }
        color[t0] = Some(Sign::Plus);
        queue.push_back(t0);
        while let Some(t) = queue.pop_front() {
            let ct = color[t].unwrap();
            for e in mesh.triangle_edges(t) {
                let n = mesh.other_triangle(e, t);
                if n == NO_TRIANGLE {
                    continue;
                }
                let want = if cut.contains(e) { ct.flip() } else { ct };
                match color[n] {
                    None => {
                        color[n] = Some(want);
                        queue.push_back(n);
                    }
                    Some(c) if c != want => {
                        let [a, b] = mesh.edge(e);
                        return Ok(HomologyCertificate::no(format!(
                            "inconsistent coloring across edge {e} ({a}, {b})"
                        )));
                    }
                    _ => {}
                }
            }
        }
    }
    let minus_triangles = (0..nt).filter(|&t| color[t] == Some(Sign::Minus)).collect();
    Ok(HomologyCertificate {
        verdict: true,
        witness: Some(Witness::Coloring { minus_triangles }),
        obstruction_note: None,
    })
}

/// Whether `cut1` and `cut2` are homologous relative to ∂M.
pub fn are_homologous(mesh: &SurfaceMesh, cut1: &Cut, cut2: &Cut) -> Result<HomologyCertificate> {
    cut1.check_mesh(mesh)?;
    cut2.check_mesh(mesh)?;
    null_homologous(mesh, &cut1.symmetric_difference(cut2)?)
}

/// Edges where a 2-chain's boundary differs from the cut (modulo ∂M).
fn chain_defects(mesh: &SurfaceMesh, cut: &Cut, chain: &Chain2) -> Vec<usize> {
    interior_edges(mesh)
        .filter(|&e| {
            let n = mesh
                .edge_triangles(e)
                .iter()
                .filter(|t| chain.triangles.contains(t))
                .count();
            (n % 2 == 1) != cut.contains(e)
        })
        .collect()
}

/// Check ∂₂ω ≡ cut (mod ∂M) by substitution.
pub fn verify_chain(mesh: &SurfaceMesh, cut: &Cut, chain: &Chain2) -> bool {
    chain.triangles.iter().all(|&t| t < mesh.num_triangles())
        && chain_defects(mesh, cut, chain).is_empty()
}

/// Check that a coloring flips exactly across cut edges.
pub fn verify_coloring(mesh: &SurfaceMesh, cut: &Cut, coloring: &TriangleColoring) -> bool {
    coloring.colors.len() == mesh.num_triangles()
        && verify_chain(mesh, cut, &coloring.minus_triangles())
}

/// Check whichever witness the certificate carries.
pub fn verify_certificate(mesh: &SurfaceMesh, cut: &Cut, cert: &HomologyCertificate) -> bool {
    match (&cert.witness, cert.verdict) {
        (Some(_), true) => cert
            .coloring(mesh)
            .is_some_and(|c| verify_coloring(mesh, cut, &c)),
        (None, false) => true,
        _ => false,
    }
}

/// Rank of H₁(M, ∂M; Z₂).
pub fn h1_rank(mesh: &SurfaceMesh) -> usize {
    let int_edges: Vec<usize> = interior_edges(mesh).collect();
    let mut vid = vec![usize::MAX; mesh.num_vertices()];
    let mut nvi = 0;
    for v in 0..mesh.num_vertices() {
        if !mesh.is_boundary_vertex(v) {
            vid[v] = nvi;
            nvi += 1;
        }
    }
    let mut d1 = Gf2System::new(nvi.max(1));
    let mut d2t = Gf2System::new(mesh.num_triangles());
    for &e in &int_edges {
        d1.push_row(
            mesh.edge(e)
                .into_iter()
                .filter(|&v| vid[v] != usize::MAX)
                .map(|v| vid[v]),
            false,
        );
        d2t.push_row(mesh.edge_triangles(e), false);
    }
    int_edges.len() - d1.rank() - d2t.rank()
}

/// Find `S ⊆ candidates` homologous to `target`, if any.
///
/// Solves ∂₂ω + Σ x_e·e ≡ target (mod ∂M) with the `x` variables eliminated
/// first; free `x` are set to zero, so the answer is deterministic.
pub fn exists_homologous_subset(
    mesh: &SurfaceMesh,
    candidates: &BTreeSet<usize>,
    target: &Cut,
) -> Result<Option<Cut>> {
    target.check_mesh(mesh)?;
    let cands: Vec<usize> = candidates.iter().copied().collect();
    for &e in &cands {
        if e >= mesh.num_edges() {
            return Err(Error::OutOfRange(format!("edge id {e}")));
        }
        if mesh.is_boundary_edge(e) {
            return Err(Error::BoundaryEdgeInCut(e));
        }
    }
    let nc = cands.len();
    let nt = mesh.num_triangles();
    let mut sys = Gf2System::new(nc + nt);
    for e in interior_edges(mesh) {
        let x = cands.binary_search(&e).ok();
        let cols = mesh.edge_triangles(e).map(|t| nc + t).into_iter().chain(x);
        sys.push_row(cols, target.contains(e));
    }
    // ω first so that x stays as close to zero as the system allows
    let order: Vec<usize> = (nc..nc + nt).chain(0..nc).collect();
    let Some(x) = sys.solve_with_order(&order) else {
        return Ok(None);
    };
    let s = Cut::new(mesh, (0..nc).filter(|&i| x[i]).map(|i| cands[i]))?;
    Ok(Some(s))
}

/// Write the text cut format.
pub fn write_cut(mesh: &SurfaceMesh, cut: &Cut, mut w: impl Write) -> Result<()> {
    cut.check_mesh(mesh)?;
    writeln!(w, "cutlap-cut v1")?;
    for &e in cut.edges() {
        let [a, b] = mesh.edge(e);
        writeln!(w, "{a} {b}")?;
    }
    Ok(())
}

/// Read the text cut format; fails on vertex pairs that are not edges.
pub fn read_cut(mesh: &SurfaceMesh, r: impl Read) -> Result<Cut> {
    let mut edges = Vec::new();
    let mut saw_header = false;
    for (i, line) in BufReader::new(r).lines().enumerate() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        if !saw_header {
            if t != "cutlap-cut v1" {
                return Err(Error::parse(i + 1, "expected `cutlap-cut v1`"));
            }
            saw_header = true;
            continue;
        }
        let ids: Vec<usize> = t
            .split_whitespace()
            .map(|s| s.parse())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::parse(i + 1, "expected two vertex ids"))?;
        let [u, v] = ids[..] else {
            return Err(Error::parse(i + 1, "expected two vertex ids"));
        };
        let e = mesh
            .edge_between(u, v)
            .ok_or_else(|| Error::parse(i + 1, format!("({u}, {v}) is not an edge")))?;
        edges.push(e);
    }
    if !saw_header {
        return Err(Error::parse(1, "empty cut file"));
    }
    Cut::new(mesh, edges)
}
