//! Structured JSON reports for the command-line pipelines.
//!
//! Every report carries `schema_version` and a `kind` discriminator and
//! validates against [`REPORT_SCHEMA`].

use serde::{Deserialize, Serialize};

use crate::eigen::{SolverStats, Spectrum};
use crate::error::Result;
use crate::geometry::{SurfaceMesh, Vec3};
use crate::homology::{
    are_homologous, exists_homologous_subset, is_relative_cycle, null_homologous, odd_points,
    verify_certificate, Cut, HomologyCertificate, Witness,
};
use crate::operator::DofMap;
use crate::scenarios::ScenarioReport;
use crate::spectral::{
    is_courant_sharp, partition_energy_with, CourantReport, EnergyOptions, PartEnergy, Partition,
};

/// Bumped whenever a report field changes.
pub const REPORT_SCHEMA_VERSION: u32 = 1;

/// JSON Schema (draft 2020-12) covering every report kind.
pub const REPORT_SCHEMA: &str = include_str!("../schema/report.schema.json");

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeshSummary {
    pub surface: String,
    pub vertices: usize,
    pub edges: usize,
    pub triangles: usize,
    pub euler: i64,
    pub area: f64,
    pub boundary_edges: usize,
}

impl MeshSummary {
    pub fn of(mesh: &SurfaceMesh) -> Self {
        MeshSummary {
            surface: mesh.tag().as_str().to_string(),
            vertices: mesh.num_vertices(),
            edges: mesh.num_edges(),
            triangles: mesh.num_triangles(),
            euler: mesh.euler_characteristic(),
            area: mesh.total_area(),
            boundary_edges: mesh.num_boundary_edges(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeshReport {
    pub schema_version: u32,
    pub kind: String,
    pub mesh: MeshSummary,
    pub boundary_loops: usize,
    /// Euler characteristic implied by the surface tag.
    pub expected_euler: Option<i64>,
    pub fingerprint: String,
}

impl MeshReport {
    pub fn new(mesh: &SurfaceMesh) -> Self {
        MeshReport {
            schema_version: REPORT_SCHEMA_VERSION,
            kind: "mesh".into(),
            mesh: MeshSummary::of(mesh),
            boundary_loops: mesh.boundary_loops().len(),
            expected_euler: mesh.tag().expected_euler(),
            fingerprint: format!("{:016x}", mesh.fingerprint()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificateReport {
    pub verdict: bool,
    /// Whether the witness was re-checked against the cut.
    pub verified: bool,
    pub witness: Option<Witness>,
    pub note: Option<String>,
}

impl CertificateReport {
    fn new(mesh: &SurfaceMesh, cut: &Cut, cert: HomologyCertificate) -> Self {
        let verified = verify_certificate(mesh, cut, &cert);
        CertificateReport {
            verdict: cert.verdict,
            verified,
            witness: cert.witness,
            note: cert.obstruction_note,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CutSummary {
    pub name: String,
    pub edges: usize,
    pub odd_points: Vec<usize>,
    pub odd_positions: Vec<Vec3>,
    pub null_homologous: CertificateReport,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    /// `Γ₁ + Γ₂` has no odd points.
    pub relative_cycle: bool,
    pub homologous: CertificateReport,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HomologyReport {
    pub schema_version: u32,
    pub kind: String,
    pub mesh: MeshSummary,
    pub cuts: Vec<CutSummary>,
    /// Present when exactly two cuts were given.
    pub comparison: Option<Comparison>,
}

impl HomologyReport {
    pub fn new(mesh: &SurfaceMesh, cuts: &[(String, Cut)]) -> Result<Self> {
        let mut summaries = Vec::with_capacity(cuts.len());
        for (name, cut) in cuts {
            let odd = odd_points(mesh, cut)?;
            let cert = null_homologous(mesh, cut)?;
            summaries.push(CutSummary {
                name: name.clone(),
                edges: cut.len(),
                odd_positions: odd.iter().map(|&v| mesh.vertex(v)).collect(),
                odd_points: odd.into_iter().collect(),
                null_homologous: CertificateReport::new(mesh, cut, cert),
            });
        }
        let comparison = match cuts {
            [(_, a), (_, b)] => {
                let cert = are_homologous(mesh, a, b)?;
                let diff = a.symmetric_difference(b)?;
                Some(Comparison {
                    relative_cycle: is_relative_cycle(mesh, a, b)?,
                    homologous: CertificateReport::new(mesh, &diff, cert),
                })
            }
            _ => None,
        };
        Ok(HomologyReport {
            schema_version: REPORT_SCHEMA_VERSION,
            kind: "homology".into(),
            mesh: MeshSummary::of(mesh),
            cuts: summaries,
            comparison,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub schema_version: u32,
    pub kind: String,
    pub mesh: MeshSummary,
    pub cut_edges: usize,
    pub odd_points: usize,
    pub dofs: usize,
    pub eigenvalues: Vec<f64>,
    pub residuals: Vec<f64>,
    pub trailing: Vec<f64>,
    pub solver: SolverStats,
    pub courant: Vec<CourantReport>,
    /// Files written alongside the report.
    pub exports: Vec<String>,
}

impl SpectrumReport {
    pub fn new(
        mesh: &SurfaceMesh,
        cut: &Cut,
        dofs: &DofMap,
        spectrum: &Spectrum,
        zero_tol: f64,
    ) -> Result<Self> {
        let courant = (1..=spectrum.len())
            .map(|i| is_courant_sharp(mesh, cut, dofs, spectrum, i, zero_tol))
            .collect::<Result<Vec<_>>>()?;
        Ok(SpectrumReport {
            schema_version: REPORT_SCHEMA_VERSION,
            kind: "spectrum".into(),
            mesh: MeshSummary::of(mesh),
            cut_edges: cut.len(),
            odd_points: odd_points(mesh, cut)?.len(),
            dofs: dofs.n_dofs(),
            eigenvalues: spectrum.eigenvalues.clone(),
            residuals: spectrum.residuals.clone(),
            trailing: spectrum.trailing.clone(),
            solver: spectrum.stats.clone(),
            courant,
            exports: Vec::new(),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Membership {
    /// The boundary set contains a cut homologous to the target.
    #[serde(rename = "in_Pk")]
    pub in_pk: bool,
    pub target_edges: usize,
    /// Edges of the homologous subset found.
    pub witness_edges: Option<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyFileReport {
    pub schema_version: u32,
    pub kind: String,
    pub mesh: MeshSummary,
    pub k: usize,
    pub unassigned: usize,
    /// `Λ(P)`, the largest first Dirichlet eigenvalue over the parts.
    pub energy: f64,
    pub parts: Vec<PartEnergy>,
    pub membership: Option<Membership>,
}

impl EnergyFileReport {
    pub fn new(
        mesh: &SurfaceMesh,
        partition: &Partition,
        target: Option<&Cut>,
        opts: &EnergyOptions,
    ) -> Result<Self> {
        let energy = partition_energy_with(mesh, partition, opts)?;
        let membership = match target {
            Some(cut) => {
                let walls = partition.boundary_set(mesh)?;
                let found = exists_homologous_subset(mesh, &walls, cut)?;
                Some(Membership {
                    in_pk: found.is_some(),
                    target_edges: cut.len(),
                    witness_edges: found.map(|s| s.edges().iter().copied().collect()),
                })
            }
            None => None,
        };
        Ok(EnergyFileReport {
            schema_version: REPORT_SCHEMA_VERSION,
            kind: "energy".into(),
            mesh: MeshSummary::of(mesh),
            k: partition.k(),
            unassigned: partition.num_unassigned(),
            energy: energy.energy,
            parts: energy.parts,
            membership,
        })
    }
}

/// Several scenario reports from one invocation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub schema_version: u32,
    pub kind: String,
    pub refine_delta: i32,
    pub passed: bool,
    pub scenarios: Vec<ScenarioReport>,
    pub elapsed_s: f64,
}

impl SuiteReport {
    pub fn new(refine_delta: i32, scenarios: Vec<ScenarioReport>, elapsed_s: f64) -> Self {
        SuiteReport {
            schema_version: REPORT_SCHEMA_VERSION,
            kind: "suite".into(),
            refine_delta,
            passed: scenarios.iter().all(|s| s.passed),
            scenarios,
            elapsed_s,
        }
    }
}
