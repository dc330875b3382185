use std::collections::BTreeSet;
use std::io::{BufRead, BufReader, Read, Write};

use serde::{Deserialize, Serialize};

use crate::eigen::{smallest_eigenpairs_with, EigenOptions};
use crate::error::{Error, Result};
use crate::geometry::{SurfaceMesh, NO_TRIANGLE};
use crate::homology::{exists_homologous_subset, Cut};
use crate::operator::assemble_dirichlet;

/// A k-partition given by triangle labels `1..=k`; label 0 marks triangles
/// that belong to no part. Every part is nonempty and dual-connected.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partition {
    mesh_id: u64,
    labels: Vec<usize>,
    k: usize,
}

impl Partition {
    pub fn new(mesh: &SurfaceMesh, labels: Vec<usize>) -> Result<Self> {
        if labels.len() != mesh.num_triangles() {
            return Err(Error::InvalidParameter(format!(
                "{} labels for {} triangles",
                labels.len(),
                mesh.num_triangles()
            )));
        }
        let k = labels.iter().copied().max().unwrap_or(0);
        let mut parts = vec![Vec::new(); k];
        for (t, &l) in labels.iter().enumerate() {
            if l > 0 {
                parts[l - 1].push(t);
            }
        }
        for (i, p) in parts.iter().enumerate() {
            if p.is_empty() {
                return Err(Error::EmptySubdomain);
            }
            let comps = mesh.dual_components(p).len();
            if comps != 1 {
                return Err(Error::InvalidParameter(format!(
                    "part {} has {comps} components",
                    i + 1
                )));
            }
        }
        Ok(Partition {
            mesh_id: mesh.fingerprint(),
            labels,
            k,
        })
    }

    /// Parts are the dual components left after removing the edges in `walls`.
    pub fn from_walls(mesh: &SurfaceMesh, walls: &BTreeSet<usize>) -> Result<Self> {
        let nt = mesh.num_triangles();
        let mut labels = vec![0usize; nt];
        let mut next = 0;
        for t0 in 0..nt {
            if labels[t0] != 0 {
                continue;
            }
            next += 1;
            labels[t0] = next;
            let mut stack = vec![t0];
            while let Some(t) = stack.pop() {
                for e in mesh.triangle_edges(t) {
                    if walls.contains(&e) {
                        continue;
                    }
                    let n = mesh.other_triangle(e, t);
                    if n != NO_TRIANGLE && labels[n] == 0 {
                        labels[n] = next;
                        stack.push(n);
                    }
                }
            }
        }
        Partition::new(mesh, labels)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn belongs_to(&self, mesh: &SurfaceMesh) -> bool {
        self.mesh_id == mesh.fingerprint() && self.labels.len() == mesh.num_triangles()
    }

    fn check_mesh(&self, mesh: &SurfaceMesh) -> Result<()> {
        if self.belongs_to(mesh) {
            Ok(())
        } else {
            Err(Error::MismatchedMesh)
        }
    }

    /// Triangles of every part, in label order.
    pub fn parts(&self) -> Vec<Vec<usize>> {
        let mut parts = vec![Vec::new(); self.k];
        for (t, &l) in self.labels.iter().enumerate() {
            if l > 0 {
                parts[l - 1].push(t);
            }
        }
        parts
    }

    pub fn num_unassigned(&self) -> usize {
        self.labels.iter().filter(|&&l| l == 0).count()
    }

    /// Interior edges separating differently labelled triangles.
    pub fn boundary_set(&self, mesh: &SurfaceMesh) -> Result<BTreeSet<usize>> {
        self.check_mesh(mesh)?;
        Ok((0..mesh.num_edges())
            .filter(|&e| {
                let [a, b] = mesh.edge_triangles(e);
                b != NO_TRIANGLE && self.labels[a] != self.labels[b]
            })
            .collect())
    }

    pub fn part_areas(&self, mesh: &SurfaceMesh) -> Result<Vec<f64>> {
        self.check_mesh(mesh)?;
        let mut areas = vec![0.0; self.k];
        for (t, &l) in self.labels.iter().enumerate() {
            if l > 0 {
                areas[l - 1] += mesh.triangle_area(t);
            }
        }
        Ok(areas)
    }
}

/// Write the text partition format: a `cutlap-partition v1 k=<k>` header,
/// then one label per triangle.
pub fn write_partition(mesh: &SurfaceMesh, partition: &Partition, mut w: impl Write) -> Result<()> {
    partition.check_mesh(mesh)?;
    writeln!(w, "cutlap-partition v1 k={}", partition.k)?;
    writeln!(w, "T {}", partition.labels.len())?;
    for l in &partition.labels {
        writeln!(w, "{l}")?;
    }
    Ok(())
}

pub fn read_partition(mesh: &SurfaceMesh, r: impl Read) -> Result<Partition> {
    let mut lines = BufReader::new(r)
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| {
            l.as_ref().map_or(true, |s| {
                !s.trim().is_empty() && !s.trim_start().starts_with('#')
            })
        });
    let mut next = || -> Result<(usize, String)> {
        match lines.next() {
            Some((n, l)) => Ok((n, l?.trim().to_string())),
            None => Err(Error::parse(0, "unexpected end of file")),
        }
    };
    let (n, header) = next()?;
    let k: usize = header
        .strip_prefix("cutlap-partition v1 k=")
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| Error::parse(n, "expected `cutlap-partition v1 k=<k>`"))?;
    let (n, count) = next()?;
    let count: usize = count
        .strip_prefix("T ")
        .and_then(|s| s.trim().parse().ok())
        .ok_or_else(|| Error::parse(n, "expected `T <count>`"))?;
    if count != mesh.num_triangles() {
        return Err(Error::parse(
            n,
            format!(
                "{count} labels for a mesh with {} triangles",
                mesh.num_triangles()
            ),
        ));
    }
    let mut labels = Vec::with_capacity(count);
    for _ in 0..count {
        let (n, l) = next()?;
        labels.push(
            l.parse()
                .map_err(|_| Error::parse(n, format!("bad label `{l}`")))?,
        );
    }
    if let Ok((n, _)) = next() {
        return Err(Error::parse(n, "trailing content"));
    }
    let p = Partition::new(mesh, labels)?;
    if p.k != k {
        return Err(Error::parse(
            1,
            format!("header says k={k}, labels give k={}", p.k),
        ));
    }
    Ok(p)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyOptions {
    /// Worker threads; 0 means one per available core.
    pub jobs: usize,
    pub tol: f64,
    pub seed: u64,
}

impl Default for EnergyOptions {
    fn default() -> Self {
        EnergyOptions {
            jobs: 0,
            tol: 1e-8,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartEnergy {
    pub label: usize,
    pub area: f64,
    pub n_dofs: usize,
    /// Dirichlet ground state; infinite for a part with no interior vertex.
    pub lambda1: f64,
    pub note: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport {
    /// Λ(P) = max over parts of λ₁.
    pub energy: f64,
    pub parts: Vec<PartEnergy>,
}

pub fn partition_energy(mesh: &SurfaceMesh, partition: &Partition) -> Result<EnergyReport> {
    partition_energy_with(mesh, partition, &EnergyOptions::default())
}

fn part_energy(
    mesh: &SurfaceMesh,
    label: usize,
    tris: &[usize],
    opts: &EnergyOptions,
) -> Result<PartEnergy> {
    let area = tris.iter().map(|&t| mesh.triangle_area(t)).sum();
    let (k, m, dofs) = assemble_dirichlet(mesh, tris)?;
    if dofs.n_dofs() == 0 {
        return Ok(PartEnergy {
            label,
            area,
            n_dofs: 0,
            lambda1: f64::INFINITY,
            note: Some("part has no interior vertex".into()),
        });
    }
    let eopts = EigenOptions {
        tol: opts.tol,
        seed: opts.seed,
        ..EigenOptions::default()
    };
    let s = smallest_eigenpairs_with(&k, &m, 1, &eopts)?;
    Ok(PartEnergy {
        label,
        area,
        n_dofs: dofs.n_dofs(),
        lambda1: s.eigenvalues[0],
        note: None,
    })
}

/// Dirichlet ground-state energy of every part, solved in parallel.
pub fn partition_energy_with(
    mesh: &SurfaceMesh,
    partition: &Partition,
    opts: &EnergyOptions,
) -> Result<EnergyReport> {
    partition.check_mesh(mesh)?;
    if partition.k == 0 {
        return Err(Error::EmptySubdomain);
    }
    let parts = partition.parts();
    let jobs = match opts.jobs {
        0 => std::thread::available_parallelism().map_or(1, |n| n.get()),
        j => j,
    }
    .min(parts.len());
    let mut results: Vec<Option<Result<PartEnergy>>> = (0..parts.len()).map(|_| None).collect();
    std::thread::scope(|scope| {
        let handles: Vec<_> = (0..jobs)
            .map(|w| {
                let parts = &parts;
                scope.spawn(move || {
                    (w..parts.len())
                        .step_by(jobs)
                        .map(|i| (i, part_energy(mesh, i + 1, &parts[i], opts)))
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        for h in handles {
            for (i, r) in h.join().expect("energy worker panicked") {
                results[i] = Some(r);
            }
        }
    });
    let parts = results
        .into_iter()
        .map(|r| r.expect("every part solved"))
        .collect::<Result<Vec<_>>>()?;
    let energy = parts
        .iter()
        .map(|p| p.lambda1)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(EnergyReport { energy, parts })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InequalityEntry {
    pub energy: f64,
    /// `energy − λ_k`, relative to `λ_k`.
    pub margin: f64,
    /// Whether the boundary set contains a cut homologous to Γ.
    pub member: bool,
    /// Size of the homologous subset found, if any.
    pub witness_edges: Option<usize>,
    /// Member partition whose energy lies below `λ_k` by more than the slack.
    pub violation: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InequalityReport {
    pub lambda_k: f64,
    pub slack: f64,
    pub entries: Vec<InequalityEntry>,
}

impl InequalityReport {
    pub fn violations(&self) -> usize {
        self.entries.iter().filter(|e| e.violation).count()
    }
}

/// Check `Λ(P) ≥ λ_k(Γ)` for every member partition, allowing a relative
/// `slack` for discretization error.
pub fn verify_min_inequality(
    mesh: &SurfaceMesh,
    cut: &Cut,
    lambda_k: f64,
    partitions: &[Partition],
    slack: f64,
    opts: &EnergyOptions,
) -> Result<InequalityReport> {
    cut.check_mesh(mesh)?;
    if !(lambda_k.is_finite() && lambda_k > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "λ_k must be positive, got {lambda_k}"
        )));
    }
    let mut entries = Vec::with_capacity(partitions.len());
    for p in partitions {
        let walls = p.boundary_set(mesh)?;
        let witness = exists_homologous_subset(mesh, &walls, cut)?;
        let energy = partition_energy_with(mesh, p, opts)?.energy;
        let margin = (energy - lambda_k) / lambda_k;
        entries.push(InequalityEntry {
            energy,
            margin,
            member: witness.is_some(),
            witness_edges: witness.as_ref().map(Cut::len),
            violation: witness.is_some() && margin < -slack,
        });
    }
    Ok(InequalityReport {
        lambda_k,
        slack,
        entries,
    })
}
