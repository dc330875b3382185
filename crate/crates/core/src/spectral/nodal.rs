use serde::{Deserialize, Serialize};

use super::{CornerField, Partition};
use crate::error::{Error, Result};
use crate::geometry::{add, scale, EdgeLift, Refinement, SurfaceMesh, NO_TRIANGLE};
use crate::homology::Cut;

/// Sign components of a P1 field.
///
/// A triangle carries a positive piece if some corner is positive and a
/// negative piece if some corner is negative; each is connected since the
/// field is linear on the triangle. Across an ordinary edge, equal-sign pieces
/// join when the field has that sign somewhere on the edge. Across a cut edge
/// the field changes sign, so a positive piece joins the negative piece on
/// the other side.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NodalDomains {
    pub count: usize,
    /// Domain id of the positive and negative piece of every triangle.
    pub pieces: Vec<[Option<usize>; 2]>,
    /// Sign (+1 / −1) of every domain.
    pub signs: Vec<i8>,
    /// Threshold below which a corner value counted as zero.
    pub zero_threshold: f64,
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, mut x: usize) -> usize {
        while self.0[x] != x {
            self.0[x] = self.0[self.0[x]];
            x = self.0[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

fn sign_of(v: f64, thr: f64) -> i8 {
    if v > thr {
        1
    } else if v < -thr {
        -1
    } else {
        0
    }
}

/// Count the nodal domains of `field` for the operator cut along `cut`.
///
/// Corner values with `|v| ≤ zero_tol · max|v|` count as zero.
pub fn nodal_domains(
    mesh: &SurfaceMesh,
    cut: &Cut,
    field: &CornerField,
    zero_tol: f64,
) -> Result<NodalDomains> {
    cut.check_mesh(mesh)?;
    if !field.belongs_to(mesh) {
        return Err(Error::MismatchedMesh);
    }
    if !(zero_tol >= 0.0) {
        return Err(Error::InvalidParameter(
            "zero tolerance must be non-negative".into(),
        ));
    }
    let max = field.max_abs();
    if max == 0.0 || !max.is_finite() {
        return Err(Error::ZeroField);
    }
    let thr = zero_tol * max;
    let nt = mesh.num_triangles();
    let signs: Vec<[i8; 3]> = field
        .values
        .iter()
        .map(|v| v.map(|x| sign_of(x, thr)))
        .collect();
    let has = |t: usize, s: i8| signs[t].contains(&s);
    // piece (t, +) is 2t, (t, −) is 2t + 1
    let piece = |t: usize, s: i8| 2 * t + usize::from(s < 0);
    let mut uf = UnionFind((0..2 * nt).collect());

    for e in 0..mesh.num_edges() {
        let [t0, t1] = mesh.edge_triangles(e);
        if t1 == NO_TRIANGLE {
            continue;
        }
        let [a, b] = mesh.edge(e);
        let local = |t: usize, v: usize| mesh.triangle(t).iter().position(|&w| w == v).unwrap();
        let on_edge = [signs[t0][local(t0, a)], signs[t0][local(t0, b)]];
        let flip: i8 = if cut.contains(e) { -1 } else { 1 };
        for s in [1i8, -1] {
            if on_edge.contains(&s) && has(t1, s * flip) {
                uf.union(piece(t0, s), piece(t1, s * flip));
            }
        }
    }

    let mut root_id = vec![usize::MAX; 2 * nt];
    let mut domain_sign = Vec::new();
    let mut pieces = vec![[None, None]; nt];
    for t in 0..nt {
        for (k, s) in [1i8, -1].into_iter().enumerate() {
            if !has(t, s) {
                continue;
            }
            let r = uf.find(piece(t, s));
            if root_id[r] == usize::MAX {
                root_id[r] = domain_sign.len();
                domain_sign.push(s);
            }
            pieces[t][k] = Some(root_id[r]);
        }
    }
    Ok(NodalDomains {
        count: domain_sign.len(),
        pieces,
        signs: domain_sign,
        zero_threshold: thr,
    })
}

/// Crossings closer than this (relative to edge length) snap to the endpoint.
const SNAP: f64 = 0.02;

/// Split every sign-changing triangle along the zero line of `field`.
///
/// New vertices sit on the flat edges where the P1 field vanishes, so the
/// field stays exactly piecewise linear on the result and its nodal lines
/// become edge paths. Vertices whose crossing would fall within `SNAP` of
/// them are set to zero instead. Returns the split mesh with its maps and the
/// field on it.
pub fn split_along_nodal_set(
    mesh: &SurfaceMesh,
    field: &CornerField,
    zero_tol: f64,
) -> Result<(Refinement, CornerField)> {
    if !field.belongs_to(mesh) {
        return Err(Error::MismatchedMesh);
    }
    let max = field.max_abs();
    if max == 0.0 || !max.is_finite() {
        return Err(Error::ZeroField);
    }
    let thr = zero_tol * max;
    let nt = mesh.num_triangles();
    let mut values: Vec<[f64; 3]> = field
        .values
        .iter()
        .map(|v| v.map(|x| if x.abs() <= thr { 0.0 } else { x }))
        .collect();
    let local = |t: usize, v: usize| mesh.triangle(t).iter().position(|&w| w == v).unwrap();
    let edge_values = |values: &[[f64; 3]], e: usize| {
        let t = mesh.edge_triangles(e)[0];
        let [a, b] = mesh.edge(e);
        (values[t][local(t, a)], values[t][local(t, b)])
    };

    let mut zeroed = vec![false; mesh.num_vertices()];
    for e in 0..mesh.num_edges() {
        let (va, vb) = edge_values(&values, e);
        if va * vb < 0.0 {
            let s = va / (va - vb);
            let [a, b] = mesh.edge(e);
            if s < SNAP {
                zeroed[a] = true;
            } else if s > 1.0 - SNAP {
                zeroed[b] = true;
            }
        }
    }
    for (t, tri) in mesh.triangles().iter().enumerate() {
        for c in 0..3 {
            if zeroed[tri[c]] {
                values[t][c] = 0.0;
            }
        }
    }

    let mut vertices = mesh.vertices().to_vec();
    let mut crossing = vec![usize::MAX; mesh.num_edges()];
    for e in 0..mesh.num_edges() {
        let (va, vb) = edge_values(&values, e);
        if va * vb < 0.0 {
            let s = va / (va - vb);
            let [a, b] = mesh.edge(e);
            let pa = mesh.vertex(a);
            let mut p = add(pa, scale(mesh.displacement(pa, mesh.vertex(b)), s));
            if mesh.period().is_periodic() {
                p = mesh.period().wrap(p);
            }
            crossing[e] = vertices.len();
            vertices.push(p);
        }
    }

    let mut triangles = Vec::with_capacity(nt + nt / 4);
    let mut new_values: Vec<[f64; 3]> = Vec::with_capacity(triangles.capacity());
    let mut parent = Vec::with_capacity(triangles.capacity());
    let dist2 = |a: usize, b: usize| {
        let d = mesh.displacement(vertices[a], vertices[b]);
        d[0] * d[0] + d[1] * d[1] + d[2] * d[2]
    };
    for t in 0..nt {
        let tri = mesh.triangle(t);
        let te = mesh.triangle_edges(t);
        let v = values[t];
        let m: Vec<usize> = (0..3).filter(|&k| crossing[te[k]] != usize::MAX).collect();
        // corner value of a sub-triangle vertex: parent corner or zero on a crossing
        let val = |x: usize| tri.iter().position(|&w| w == x).map_or(0.0, |c| v[c]);
        let mut emit = |corners: [usize; 3]| {
            triangles.push(corners);
            new_values.push(corners.map(val));
            parent.push(t);
        };
        match m.as_slice() {
            [] => emit(tri),
            [k] => {
                let (k, mk) = (*k, crossing[te[*k]]);
                emit([tri[k], mk, tri[(k + 2) % 3]]);
                emit([mk, tri[(k + 1) % 3], tri[(k + 2) % 3]]);
            }
            [_, _] => {
                // lone corner j: crossings on edge j (j, j+1) and edge j+2 (j+2, j)
                let j = (0..3)
                    .find(|&j| {
                        crossing[te[j]] != usize::MAX && crossing[te[(j + 2) % 3]] != usize::MAX
                    })
                    .unwrap();
                let (cj, c1, c2) = (tri[j], tri[(j + 1) % 3], tri[(j + 2) % 3]);
                let (mj, m2) = (crossing[te[j]], crossing[te[(j + 2) % 3]]);
                emit([cj, mj, m2]);
                if dist2(mj, c2) <= dist2(c1, m2) {
                    emit([mj, c1, c2]);
                    emit([mj, c2, m2]);
                } else {
                    emit([mj, c1, m2]);
                    emit([c1, c2, m2]);
                }
            }
            _ => unreachable!("a linear field changes sign on at most two edges"),
        }
    }
    let split = SurfaceMesh::new(vertices, triangles, mesh.tag(), mesh.period())?;
    let children = (0..mesh.num_edges())
        .map(|e| {
            let [a, b] = mesh.edge(e);
            let child =
                |x: usize, y: usize| split.edge_between(x, y).expect("split keeps edge halves");
            match crossing[e] {
                usize::MAX => vec![child(a, b)],
                c => vec![child(a, c), child(c, b)],
            }
        })
        .collect();
    let out_field = CornerField {
        mesh_id: split.fingerprint(),
        values: new_values,
        eigenvalue: field.eigenvalue,
    };
    let refinement = Refinement {
        mesh: split,
        edge_lift: EdgeLift::from_children(children),
        parent_triangle: parent,
    };
    Ok((refinement, out_field))
}

/// A nodal partition realised on the mesh split along the nodal set.
#[derive(Clone, Debug)]
pub struct NodalPartition {
    pub split: Refinement,
    /// The cut carried to the split mesh.
    pub cut: Cut,
    pub field: CornerField,
    pub partition: Partition,
    /// Nodal count on the original mesh.
    pub count: usize,
}

/// Nodal domains of `field` as a partition of the split mesh: one part per
/// domain, every split triangle labelled by the sign it carries.
pub fn nodal_partition(
    mesh: &SurfaceMesh,
    cut: &Cut,
    field: &CornerField,
    zero_tol: f64,
) -> Result<NodalPartition> {
    let count = nodal_domains(mesh, cut, field, zero_tol)?.count;
    let (split, sfield) = split_along_nodal_set(mesh, field, zero_tol)?;
    let scut = cut.lift(&split)?;
    let nodal = nodal_domains(&split.mesh, &scut, &sfield, 0.0)?;
    let labels = nodal
        .pieces
        .iter()
        .map(|p| p[0].or(p[1]).map_or(0, |d| d + 1))
        .collect();
    let partition = Partition::new(&split.mesh, labels)?;
    Ok(NodalPartition {
        split,
        cut: scut,
        field: sfield,
        partition,
        count,
    })
}
