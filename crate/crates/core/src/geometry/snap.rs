use std::cmp::Ordering;
use std::collections::{BTreeSet, BinaryHeap, HashMap};

use serde::{Deserialize, Serialize};

use super::{add, norm, scale, sub, SurfaceMesh, Vec3};
use crate::error::{Error, Result};

/// Connected walk along mesh edges, either closed or with two endpoints.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgePath {
    vertices: Vec<usize>,
    edges: Vec<usize>,
}

impl EdgePath {
    /// Build from a vertex walk; consecutive vertices must span mesh edges.
    pub fn from_vertices(mesh: &SurfaceMesh, vertices: Vec<usize>) -> Result<Self> {
        if vertices.len() < 2 {
            return Err(Error::InvalidParameter(
                "an edge path needs at least two vertices".into(),
            ));
        }
        let edges = vertices
            .windows(2)
            .map(|w| {
                mesh.edge_between(w[0], w[1])
                    .ok_or(Error::NotAnEdge(w[0], w[1]))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(EdgePath { vertices, edges })
    }

    pub fn edges(&self) -> &[usize] {
        &self.edges
    }

    /// The visited vertices in order; a closed path repeats its first vertex at the end.
    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    pub fn is_closed(&self) -> bool {
        self.vertices.first() == self.vertices.last()
    }

    pub fn endpoints(&self) -> Option<[usize; 2]> {
        if self.is_closed() {
            None
        } else {
            Some([self.vertices[0], *self.vertices.last().unwrap()])
        }
    }

    pub fn length(&self, mesh: &SurfaceMesh) -> f64 {
        self.edges.iter().map(|&e| mesh.edge_length(e)).sum()
    }

    /// Edges traversed an odd number of times, as a Z₂ 1-chain.
    pub fn edge_chain(&self) -> BTreeSet<usize> {
        let mut set = BTreeSet::new();
        for &e in &self.edges {
            if !set.remove(&e) {
                set.insert(e);
            }
        }
        set
    }
}

#[derive(PartialEq)]
struct Node(f64, usize);

impl Eq for Node {}

impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Node {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .0
            .total_cmp(&self.0)
            .then_with(|| other.1.cmp(&self.1))
    }
}

fn neighbours(mesh: &SurfaceMesh) -> Vec<Vec<(usize, usize)>> {
    let mut adj = vec![Vec::new(); mesh.num_vertices()];
    for (e, &[a, b]) in mesh.edges().iter().enumerate() {
        adj[a].push((b, e));
        adj[b].push((a, e));
    }
    adj
}

fn shortest_walk(
    mesh: &SurfaceMesh,
    adj: &[Vec<(usize, usize)>],
    from: usize,
    to: usize,
) -> Result<Vec<usize>> {
    let mut dist: HashMap<usize, f64> = HashMap::new();
    let mut prev: HashMap<usize, usize> = HashMap::new();
    let mut heap = BinaryHeap::new();
    dist.insert(from, 0.0);
    heap.push(Node(0.0, from));
    while let Some(Node(d, v)) = heap.pop() {
        if v == to {
            let mut walk = vec![to];
            let mut cur = to;
            while cur != from {
                cur = prev[&cur];
                walk.push(cur);
            }
            walk.reverse();
            return Ok(walk);
        }
        if d > dist[&v] {
            continue;
        }
        for &(w, e) in &adj[v] {
            let nd = d + mesh.edge_length(e);
            if dist.get(&w).is_none_or(|&old| nd < old) {
                dist.insert(w, nd);
                prev.insert(w, v);
                heap.push(Node(nd, w));
            }
        }
    }
    Err(Error::InvalidParameter(format!(
        "vertices {from} and {to} are not connected in the mesh"
    )))
}

/// Snap a polyline to the mesh: sample it densely, take the nearest vertex
/// of every sample, and join consecutive vertices by shortest edge walks.
/// Polyline points are chart/embedding coordinates; a polyline whose ends
/// coincide (possibly modulo a period) yields a closed path.
pub fn snap_curve(mesh: &SurfaceMesh, polyline: &[Vec3]) -> Result<EdgePath> {
    if polyline.len() < 2 {
        return Err(Error::InvalidParameter(
            "polyline needs at least two points".into(),
        ));
    }
    if polyline.iter().flatten().any(|x| !x.is_finite()) {
        return Err(Error::InvalidParameter(
            "polyline has non-finite coordinates".into(),
        ));
    }
    let step = 0.5 * mesh.mean_edge_length();
    let mut anchors: Vec<usize> = Vec::new();
    let push = |v: usize, anchors: &mut Vec<usize>| {
        if anchors.last() != Some(&v) {
            anchors.push(v);
        }
    };
    push(mesh.nearest_vertex(polyline[0]), &mut anchors);
    for w in polyline.windows(2) {
        let d = sub(w[1], w[0]);
        let n = (norm(d) / step).ceil().max(1.0) as usize;
        for i in 1..=n {
            let p = add(w[0], scale(d, i as f64 / n as f64));
            push(mesh.nearest_vertex(p), &mut anchors);
        }
    }
    if anchors.len() < 2 {
        return Err(Error::InvalidParameter(
            "polyline snaps to a single vertex".into(),
        ));
    }

    let adj = neighbours(mesh);
    let mut walk = vec![anchors[0]];
    for w in anchors.windows(2) {
        let seg = shortest_walk(mesh, &adj, w[0], w[1])?;
        walk.extend_from_slice(&seg[1..]);
    }
    // drop immediate backtracks a-b-a
    let mut clean: Vec<usize> = Vec::with_capacity(walk.len());
    for v in walk {
        if clean.len() >= 2 && clean[clean.len() - 2] == v {
            clean.pop();
        } else {
            clean.push(v);
        }
    }
    EdgePath::from_vertices(mesh, clean)
}
