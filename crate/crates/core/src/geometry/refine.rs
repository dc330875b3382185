use std::collections::BTreeSet;

use super::{add, norm, scale, SurfaceMesh, SurfaceTag, Vec3};

/// Maps each parent edge to the child edges covering it (two halves if
/// split, the same segment otherwise).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeLift {
    children: Vec<Vec<usize>>,
}

impl EdgeLift {
    pub(crate) fn from_children(children: Vec<Vec<usize>>) -> Self {
        EdgeLift { children }
    }

    pub fn children(&self, parent_edge: usize) -> &[usize] {
        &self.children[parent_edge]
    }

    pub fn num_parent_edges(&self) -> usize {
        self.children.len()
    }

    /// Image of a parent edge set.
    pub fn lift(&self, edges: &BTreeSet<usize>) -> BTreeSet<usize> {
        edges
            .iter()
            .flat_map(|&e| self.children[e].iter().copied())
            .collect()
    }

    /// Lift through `self`, then through `next`.
    pub fn compose(&self, next: &EdgeLift) -> EdgeLift {
        let children = self
            .children
            .iter()
            .map(|c| {
                c.iter()
                    .flat_map(|&e| next.children[e].iter().copied())
                    .collect()
            })
            .collect();
        EdgeLift { children }
    }
}

/// A refined mesh with the bookkeeping to carry cuts and labelings along.
#[derive(Clone, Debug)]
pub struct Refinement {
    pub mesh: SurfaceMesh,
    pub edge_lift: EdgeLift,
    /// Parent triangle of every child triangle.
    pub parent_triangle: Vec<usize>,
}

/// Uniform 1:4 midpoint refinement.
pub fn refine(mesh: &SurfaceMesh) -> SurfaceMesh {
    refine_with_map(mesh).mesh
}

/// Uniform refinement, also returning the edge and triangle maps.
pub fn refine_with_map(mesh: &SurfaceMesh) -> Refinement {
    split_edges(mesh, vec![true; mesh.num_edges()])
}

/// Graded refinement toward `targets`: `rings` rounds, each splitting the
/// current star of every target (so element size near a target shrinks by
/// 0.5 per round), closed conformingly with red-green splits.
pub fn refine_graded(mesh: &SurfaceMesh, targets: &[usize], rings: usize) -> Refinement {
    let mut current = Refinement {
        mesh: mesh.clone(),
        edge_lift: EdgeLift {
            children: (0..mesh.num_edges()).map(|e| vec![e]).collect(),
        },
        parent_triangle: (0..mesh.num_triangles()).collect(),
    };
    // old vertex ids survive refinement, so targets stay valid
    for _ in 0..rings {
        let m = &current.mesh;
        let mut marked = vec![false; m.num_edges()];
        for &v in targets {
            for &t in m.vertex_fan(v) {
                for e in m.triangle_edges(t) {
                    marked[e] = true;
                }
            }
        }
        close_marking(m, &mut marked);
        let step = split_edges(m, marked);
        current = Refinement {
            edge_lift: current.edge_lift.compose(&step.edge_lift),
            parent_triangle: step
                .parent_triangle
                .iter()
                .map(|&t| current.parent_triangle[t])
                .collect(),
            mesh: step.mesh,
        };
    }
    current
}

/// Mark more edges until every triangle has 0, 1 or 3 marked edges.
fn close_marking(mesh: &SurfaceMesh, marked: &mut [bool]) {
    loop {
        let mut changed = false;
        for t in 0..mesh.num_triangles() {
            let es = mesh.triangle_edges(t);
            let n = es.iter().filter(|&&e| marked[e]).count();
            if n == 2 {
                for e in es {
                    marked[e] = true;
                }
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
}

fn midpoint(mesh: &SurfaceMesh, e: usize) -> Vec3 {
    let [a, b] = mesh.edge(e);
    let pa = mesh.vertex(a);
    let pb = mesh.vertex(b);
    let d = mesh.displacement(pa, pb);
    let mut m = add(pa, scale(d, 0.5));
    if mesh.period().is_periodic() {
        m = mesh.period().wrap(m);
    }
    if mesh.tag() == SurfaceTag::Sphere {
        m = scale(m, 1.0 / norm(m));
    } else if mesh.has_circular_boundary() && mesh.is_boundary_edge(e) {
        let r = 0.5 * (norm(pa) + norm(pb));
        m = scale(m, r / norm(m));
    }
    m
}

fn split_edges(mesh: &SurfaceMesh, marked: Vec<bool>) -> Refinement {
    let mut vertices = mesh.vertices().to_vec();
    let mut mid = vec![usize::MAX; mesh.num_edges()];
    for e in 0..mesh.num_edges() {
        if marked[e] {
            mid[e] = vertices.len();
            vertices.push(midpoint(mesh, e));
        }
    }

    let mut triangles = Vec::with_capacity(4 * mesh.num_triangles());
    let mut parent = Vec::with_capacity(4 * mesh.num_triangles());
    for t in 0..mesh.num_triangles() {
        let c = mesh.triangle(t);
        let es = mesh.triangle_edges(t);
        let m: Vec<usize> = es.iter().map(|&e| mid[e]).collect();
        let split: Vec<usize> = (0..3).filter(|&k| marked[es[k]]).collect();
        match split.len() {
            0 => triangles.push(c),
            1 => {
                let k = split[0];
                let (ck, ck1, ck2) = (c[k], c[(k + 1) % 3], c[(k + 2) % 3]);
                triangles.push([ck, m[k], ck2]);
                triangles.push([m[k], ck1, ck2]);
            }
            3 => {
                let (mab, mbc, mca) = (m[0], m[1], m[2]);
                triangles.push([c[0], mab, mca]);
                triangles.push([mab, c[1], mbc]);
                triangles.push([mca, mbc, c[2]]);
                triangles.push([mab, mbc, mca]);
            }
            _ => unreachable!("marking must be closed before splitting"),
        }
        parent.resize(triangles.len(), t);
    }

    let child = SurfaceMesh::new(vertices, triangles, mesh.tag(), mesh.period())
        .expect("refinement of a valid mesh is valid");

    let children = (0..mesh.num_edges())
        .map(|e| {
            let [a, b] = mesh.edge(e);
            let pieces: Vec<[usize; 2]> = if marked[e] {
                vec![[a, mid[e]], [mid[e], b]]
            } else {
                vec![[a, b]]
            };
            pieces
                .iter()
                .map(|&[u, v]| child.edge_between(u, v).expect("child edge exists"))
                .collect()
        })
        .collect();
    Refinement {
        mesh: child,
        edge_lift: EdgeLift { children },
        parent_triangle: parent,
    }
}
