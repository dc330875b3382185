//! Named, reproducible experiments: a mesh recipe, named cuts and
//! partitions, an operator to solve, and checks with reference values.
//!
//! Scenario definitions are TOML files shipped in `scenarios/` and compiled
//! into the library.

mod perturb;
mod run;

use std::collections::BTreeMap;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{
    build_annulus, build_disk, build_disk_graded, build_rectangle, build_sphere, snap_curve,
    Identify, SurfaceMesh,
};
use crate::homology::Cut;

pub use perturb::perturbed_partitions;
pub use run::{
    refinement_trend, run_scenario, CaseReport, CheckResult, CheckStatus, RunOptions,
    ScenarioReport, TrendFlag, TREND_FACTOR,
};

const REGISTRY: &[(&str, &str)] = &[
    (
        "disk-radial-3",
        include_str!("../../scenarios/disk-radial-3.toml"),
    ),
    (
        "disk-radial-5",
        include_str!("../../scenarios/disk-radial-5.toml"),
    ),
    ("sphere-Y", include_str!("../../scenarios/sphere-Y.toml")),
    (
        "torus-k3-threshold",
        include_str!("../../scenarios/torus-k3-threshold.toml"),
    ),
    (
        "torus-k5-threshold",
        include_str!("../../scenarios/torus-k5-threshold.toml"),
    ),
    (
        "cylinder-k3-threshold",
        include_str!("../../scenarios/cylinder-k3-threshold.toml"),
    ),
    (
        "annulus-fig5",
        include_str!("../../scenarios/annulus-fig5.toml"),
    ),
    (
        "disk-fig2-homology",
        include_str!("../../scenarios/disk-fig2-homology.toml"),
    ),
];

/// Catalog entry.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScenarioInfo {
    pub name: String,
    pub description: String,
    pub anchor: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSpec {
    pub name: String,
    pub description: String,
    /// The mathematical statement the scenario exercises.
    pub anchor: String,
    #[serde(rename = "case")]
    pub cases: Vec<CaseSpec>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CaseSpec {
    pub label: String,
    pub mesh: MeshRecipe,
    #[serde(default)]
    pub cuts: BTreeMap<String, Vec<CutPiece>>,
    /// Cut defining the operator; absent means no cut.
    #[serde(default)]
    pub operator: Option<String>,
    /// Eigenpairs to compute; 0 skips the spectral stage.
    #[serde(default)]
    pub k: usize,
    #[serde(default)]
    pub partitions: BTreeMap<String, PartitionRecipe>,
    #[serde(default)]
    pub checks: Vec<CheckSpec>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "surface", rename_all = "lowercase", deny_unknown_fields)]
pub enum MeshRecipe {
    Disk {
        refinement: usize,
        #[serde(default)]
        graded_rings: usize,
    },
    Sphere {
        refinement: usize,
    },
    Rectangle {
        width: f64,
        height: f64,
        nx: usize,
        ny: usize,
    },
    Cylinder {
        width: f64,
        height: f64,
        nx: usize,
        ny: usize,
    },
    Torus {
        width: f64,
        height: f64,
        nx: usize,
        ny: usize,
    },
    Annulus {
        inner: f64,
        outer: f64,
        n_theta: usize,
        n_r: usize,
    },
}

fn scale_count(n: usize, delta: i32, min: usize) -> usize {
    if delta >= 0 {
        n << delta
    } else {
        (n >> (-delta)).max(min)
    }
}

impl MeshRecipe {
    /// The same recipe refined `delta` levels (negative coarsens).
    pub fn refined(&self, delta: i32) -> MeshRecipe {
        let lvl = |r: usize| (r as i64 + delta as i64).max(0) as usize;
        let grid = |n: usize| scale_count(n, delta, 3);
        match *self {
            MeshRecipe::Disk {
                refinement,
                graded_rings,
            } => MeshRecipe::Disk {
                refinement: lvl(refinement),
                graded_rings,
            },
            MeshRecipe::Sphere { refinement } => MeshRecipe::Sphere {
                refinement: lvl(refinement),
            },
            MeshRecipe::Rectangle {
                width,
                height,
                nx,
                ny,
            } => MeshRecipe::Rectangle {
                width,
                height,
                nx: grid(nx),
                ny: grid(ny),
            },
            MeshRecipe::Cylinder {
                width,
                height,
                nx,
                ny,
            } => MeshRecipe::Cylinder {
                width,
                height,
                nx: grid(nx),
                ny: grid(ny),
            },
            MeshRecipe::Torus {
                width,
                height,
                nx,
                ny,
            } => MeshRecipe::Torus {
                width,
                height,
                nx: grid(nx),
                ny: grid(ny),
            },
            MeshRecipe::Annulus {
                inner,
                outer,
                n_theta,
                n_r,
            } => MeshRecipe::Annulus {
                inner,
                outer,
                n_theta: grid(n_theta),
                n_r: grid(n_r),
            },
        }
    }

    pub fn build(&self) -> Result<SurfaceMesh> {
        match *self {
            MeshRecipe::Disk {
                refinement,
                graded_rings: 0,
            } => build_disk(refinement),
            MeshRecipe::Disk {
                refinement,
                graded_rings,
            } => build_disk_graded(refinement, graded_rings),
            MeshRecipe::Sphere { refinement } => build_sphere(refinement),
            MeshRecipe::Rectangle {
                width,
                height,
                nx,
                ny,
            } => build_rectangle(width, height, nx, ny, Identify::None),
            MeshRecipe::Cylinder {
                width,
                height,
                nx,
                ny,
            } => build_rectangle(width, height, nx, ny, Identify::Horizontal),
            MeshRecipe::Torus {
                width,
                height,
                nx,
                ny,
            } => build_rectangle(width, height, nx, ny, Identify::Both),
            MeshRecipe::Annulus {
                inner,
                outer,
                n_theta,
                n_r,
            } => build_annulus(inner, outer, n_theta, n_r),
        }
    }
}

/// One curve of a cut, in the mesh's own coordinates (2-D points get z = 0).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum CutPiece {
    Segment([Vec<f64>; 2]),
    Polyline(Vec<Vec<f64>>),
    /// Circular arc in the plane, angles in degrees, counter-clockwise.
    Arc {
        center: [f64; 2],
        radius: f64,
        start_deg: f64,
        end_deg: f64,
    },
    /// Radial segment at `angle` degrees between radii `inner` and `outer`.
    Ray {
        angle: f64,
        #[serde(default)]
        inner: f64,
        #[serde(default = "one")]
        outer: f64,
    },
    /// Half great circle on the unit sphere from the north to the south pole.
    Meridian(f64),
}

fn one() -> f64 {
    1.0
}

impl CutPiece {
    /// Densely sampled polyline.
    pub fn polyline(&self) -> Result<Vec<[f64; 3]>> {
        let pt = |p: &[f64]| -> Result<[f64; 3]> {
            match *p {
                [x, y] => Ok([x, y, 0.0]),
                [x, y, z] => Ok([x, y, z]),
                _ => Err(Error::InvalidParameter(format!(
                    "point with {} coordinates",
                    p.len()
                ))),
            }
        };
        const SAMPLES: usize = 96;
        let out = match self {
            CutPiece::Segment([a, b]) => vec![pt(a)?, pt(b)?],
            CutPiece::Polyline(ps) => ps.iter().map(|p| pt(p)).collect::<Result<_>>()?,
            CutPiece::Arc {
                center,
                radius,
                start_deg,
                end_deg,
            } => (0..=SAMPLES)
                .map(|i| {
                    let a = (start_deg + (end_deg - start_deg) * i as f64 / SAMPLES as f64)
                        .to_radians();
                    [
                        center[0] + radius * a.cos(),
                        center[1] + radius * a.sin(),
                        0.0,
                    ]
                })
                .collect(),
            CutPiece::Ray {
                angle,
                inner,
                outer,
            } => {
                let (s, c) = angle.to_radians().sin_cos();
                vec![[inner * c, inner * s, 0.0], [outer * c, outer * s, 0.0]]
            }
            CutPiece::Meridian(lon) => {
                let (s, c) = lon.to_radians().sin_cos();
                (0..=SAMPLES)
                    .map(|i| {
                        let th = std::f64::consts::PI * i as f64 / SAMPLES as f64;
                        [th.sin() * c, th.sin() * s, th.cos()]
                    })
                    .collect()
            }
        };
        Ok(out)
    }
}

/// Parses `ray:ANGLE[:INNER:OUTER]`, `segment:X,Y:X,Y`, `polyline:X,Y:X,Y:…`,
/// `arc:CX,CY:R:START:END` and `meridian:LON` (angles in degrees; points may
/// carry a third coordinate).
impl FromStr for CutPiece {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |msg: &str| Error::InvalidParameter(format!("cut curve `{s}`: {msg}"));
        let (kind, rest) = s.split_once(':').ok_or_else(|| bad("expected KIND:ARGS"))?;
        let fields: Vec<&str> = rest.split(':').collect();
        let num = |f: &str| {
            f.trim()
                .parse::<f64>()
                .map_err(|_| bad(&format!("`{f}` is not a number")))
        };
        let point = |f: &str| -> Result<Vec<f64>> {
            let p = f.split(',').map(num).collect::<Result<Vec<_>>>()?;
            if matches!(p.len(), 2 | 3) {
                Ok(p)
            } else {
                Err(bad(&format!("`{f}` is not a point")))
            }
        };
        Ok(match (kind, &fields[..]) {
            ("ray", [a]) => CutPiece::Ray {
                angle: num(a)?,
                inner: 0.0,
                outer: 1.0,
            },
            ("ray", [a, i, o]) => CutPiece::Ray {
                angle: num(a)?,
                inner: num(i)?,
                outer: num(o)?,
            },
            ("segment", [a, b]) => CutPiece::Segment([point(a)?, point(b)?]),
            ("polyline", ps) if ps.len() >= 2 => {
                CutPiece::Polyline(ps.iter().map(|p| point(p)).collect::<Result<_>>()?)
            }
            ("arc", [c, r, a, b]) => {
                let c = point(c)?;
                CutPiece::Arc {
                    center: [c[0], c[1]],
                    radius: num(r)?,
                    start_deg: num(a)?,
                    end_deg: num(b)?,
                }
            }
            ("meridian", [l]) => CutPiece::Meridian(num(l)?),
            _ => return Err(bad("unknown kind or wrong number of fields")),
        })
    }
}

/// Snap every curve to the mesh and combine them into one cut (mod 2).
pub fn cut_from_pieces(mesh: &SurfaceMesh, pieces: &[CutPiece]) -> Result<Cut> {
    let mut paths = Vec::with_capacity(pieces.len());
    for p in pieces {
        paths.push(snap_curve(mesh, &p.polyline()?)?);
    }
    Ok(Cut::from_paths(mesh, paths.iter()))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartitionRecipe {
    /// Named cuts whose edges separate the parts.
    pub walls: Vec<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// Spokes from the origin at jittered angles.
    Star,
    /// Wavy vertical curves at jittered abscissae.
    Strips,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CheckSpec {
    Eigenvalue {
        index: usize,
        reference: f64,
        rel_tol: f64,
        provenance: String,
    },
    CourantSharp {
        index: usize,
        expected: bool,
    },
    /// The nodal partition of eigenvector `index` has `parts` parts of equal area.
    NodalParts {
        index: usize,
        parts: usize,
        area_tol: f64,
    },
    /// Λ of the nodal partition exceeds λ_index by at most `max_margin`
    /// (relative) and the partition lies in 𝒫_k(Γ).
    NodalEnergy {
        index: usize,
        max_margin: f64,
    },
    PartitionEnergy {
        partition: String,
        reference: f64,
        rel_tol: f64,
        provenance: String,
    },
    EnergyMatchesEigenvalue {
        partition: String,
        index: usize,
        rel_tol: f64,
    },
    /// Boundary set of `partition` contains a cut homologous to `cut`
    /// (default: the operator cut).
    Member {
        partition: String,
        #[serde(default)]
        cut: Option<String>,
        expected: bool,
    },
    OddPoints {
        cut: String,
        count: usize,
        #[serde(default)]
        near: Vec<Vec<f64>>,
    },
    RelativeCycle {
        a: String,
        b: String,
        expected: bool,
    },
    Homologous {
        a: String,
        b: String,
        expected: bool,
    },
    NullHomologous {
        cut: String,
        expected: bool,
    },
    /// λ_index of the operators cut along `a` and `b` differ by more than `min_rel_diff`.
    SpectralSeparation {
        a: String,
        b: String,
        index: usize,
        min_rel_diff: f64,
    },
    /// Random member partitions near the optimum satisfy Λ ≥ λ_k (1 − slack).
    MinInequality {
        family: Family,
        samples: usize,
        seed: u64,
        jitter: f64,
        #[serde(default)]
        amplitude: f64,
        slack: f64,
    },
}

impl CheckSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            CheckSpec::Eigenvalue { .. } => "eigenvalue",
            CheckSpec::CourantSharp { .. } => "courant_sharp",
            CheckSpec::NodalParts { .. } => "nodal_parts",
            CheckSpec::NodalEnergy { .. } => "nodal_energy",
            CheckSpec::PartitionEnergy { .. } => "partition_energy",
            CheckSpec::EnergyMatchesEigenvalue { .. } => "energy_matches_eigenvalue",
            CheckSpec::Member { .. } => "member",
            CheckSpec::OddPoints { .. } => "odd_points",
            CheckSpec::RelativeCycle { .. } => "relative_cycle",
            CheckSpec::Homologous { .. } => "homologous",
            CheckSpec::NullHomologous { .. } => "null_homologous",
            CheckSpec::SpectralSeparation { .. } => "spectral_separation",
            CheckSpec::MinInequality { .. } => "min_inequality",
        }
    }
}

impl ScenarioSpec {
    pub fn from_toml(text: &str) -> Result<Self> {
        let spec: ScenarioSpec = toml::from_str(text).map_err(|e| {
            let line = e
                .span()
                .map_or(0, |s| text[..s.start].matches('\n').count() + 1);
            Error::parse(line, e.message().to_string())
        })?;
        spec.validate()?;
        Ok(spec)
    }

    fn validate(&self) -> Result<()> {
        if self.cases.is_empty() {
            return Err(Error::InvalidParameter(format!(
                "scenario `{}` has no cases",
                self.name
            )));
        }
        for case in &self.cases {
            let known_cut = |c: &str| case.cuts.contains_key(c);
            let mut names: Vec<&str> = case.operator.iter().map(String::as_str).collect();
            for p in case.partitions.values() {
                names.extend(p.walls.iter().map(String::as_str));
            }
            for check in &case.checks {
                match check {
                    CheckSpec::Eigenvalue { index, rel_tol, .. } => {
                        require(*index >= 1 && *index <= case.k, "eigenvalue index within k")?;
                        require(*rel_tol > 0.0, "positive tolerance")?;
                    }
                    CheckSpec::CourantSharp { index, .. }
                    | CheckSpec::NodalParts { index, .. }
                    | CheckSpec::NodalEnergy { index, .. }
                    | CheckSpec::EnergyMatchesEigenvalue { index, .. } => {
                        require(
                            *index >= 1 && *index <= case.k,
                            "eigenvector index within k",
                        )?;
                    }
                    CheckSpec::PartitionEnergy { rel_tol, .. } => {
                        require(*rel_tol > 0.0, "positive tolerance")?
                    }
                    CheckSpec::OddPoints { cut, .. } | CheckSpec::NullHomologous { cut, .. } => {
                        names.push(cut)
                    }
                    CheckSpec::RelativeCycle { a, b, .. }
                    | CheckSpec::Homologous { a, b, .. }
                    | CheckSpec::SpectralSeparation { a, b, .. } => {
                        names.push(a);
                        names.push(b);
                    }
                    CheckSpec::Member { cut: Some(c), .. } => names.push(c),
                    CheckSpec::Member { cut: None, .. } => {}
                    CheckSpec::MinInequality { samples, slack, .. } => {
                        require(
                            *samples > 0 && *slack >= 0.0 && case.k > 0,
                            "min_inequality needs samples and k",
                        )?;
                    }
                }
                match check {
                    CheckSpec::PartitionEnergy { partition, .. }
                    | CheckSpec::EnergyMatchesEigenvalue { partition, .. }
                    | CheckSpec::Member { partition, .. }
                        if !case.partitions.contains_key(partition) =>
                    {
                        return Err(Error::InvalidParameter(format!(
                            "case `{}` references unknown partition `{partition}`",
                            case.label
                        )));
                    }
                    _ => {}
                }
            }
            if let Some(bad) = names.iter().find(|n| !known_cut(n)) {
                return Err(Error::InvalidParameter(format!(
                    "case `{}` references unknown cut `{bad}`",
                    case.label
                )));
            }
        }
        Ok(())
    }

    pub fn info(&self) -> ScenarioInfo {
        ScenarioInfo {
            name: self.name.clone(),
            description: self.description.clone(),
            anchor: self.anchor.clone(),
        }
    }
}

fn require(ok: bool, what: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "scenario check requires {what}"
        )))
    }
}

/// Names, descriptions and anchors of all registered scenarios, in a fixed order.
pub fn list_scenarios() -> Vec<ScenarioInfo> {
    REGISTRY
        .iter()
        .map(|(name, text)| {
            ScenarioSpec::from_toml(text)
                .unwrap_or_else(|e| panic!("registered scenario {name} is malformed: {e}"))
                .info()
        })
        .collect()
}

/// Look up a registered scenario by name.
pub fn scenario(name: &str) -> Result<ScenarioSpec> {
    REGISTRY
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, text)| ScenarioSpec::from_toml(text))
        .unwrap_or_else(|| Err(Error::UnknownScenario(name.to_string())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_parses_and_names_match() {
        for (name, text) in REGISTRY {
            let spec = ScenarioSpec::from_toml(text).unwrap();
            assert_eq!(spec.name, *name);
            assert!(!spec.anchor.is_empty());
        }
        assert_eq!(list_scenarios().len(), REGISTRY.len());
        assert!(matches!(scenario("nope"), Err(Error::UnknownScenario(_))));
    }

    #[test]
    fn unknown_references_rejected() {
        let text = r#"
name = "x"
description = "d"
anchor = "a"
[[case]]
label = "c"
mesh = { surface = "disk", refinement = 1 }
checks = [{ kind = "null_homologous", cut = "missing", expected = true }]
"#;
        assert!(matches!(
            ScenarioSpec::from_toml(text),
            Err(Error::InvalidParameter(_))
        ));
        assert!(matches!(
            ScenarioSpec::from_toml("name = 3"),
            Err(Error::Parse { .. })
        ));
    }

    #[test]
    fn cut_piece_syntax() {
        assert_eq!(
            "ray:90".parse::<CutPiece>().unwrap(),
            CutPiece::Ray {
                angle: 90.0,
                inner: 0.0,
                outer: 1.0
            }
        );
        assert_eq!(
            "segment:0.5,0:0.5,1".parse::<CutPiece>().unwrap(),
            CutPiece::Segment([vec![0.5, 0.0], vec![0.5, 1.0]])
        );
        assert_eq!(
            "arc:-0.4,0:0.4:0:180".parse::<CutPiece>().unwrap(),
            CutPiece::Arc {
                center: [-0.4, 0.0],
                radius: 0.4,
                start_deg: 0.0,
                end_deg: 180.0
            }
        );
        assert_eq!(
            "meridian:120".parse::<CutPiece>().unwrap(),
            CutPiece::Meridian(120.0)
        );
        assert!(
            matches!("polyline:0,0:1,1:1,0".parse::<CutPiece>(), Ok(CutPiece::Polyline(p)) if p.len() == 3)
        );
        for bad in [
            "ray",
            "ray:x",
            "segment:0,0",
            "segment:0:1,1",
            "spiral:1",
            "polyline:0,0",
        ] {
            assert!(bad.parse::<CutPiece>().is_err(), "{bad}");
        }
    }

    #[test]
    fn refined_recipes() {
        let r = MeshRecipe::Torus {
            width: 1.0,
            height: 0.5,
            nx: 24,
            ny: 12,
        };
        assert_eq!(
            r.refined(1),
            MeshRecipe::Torus {
                width: 1.0,
                height: 0.5,
                nx: 48,
                ny: 24
            }
        );
        assert_eq!(
            r.refined(-3),
            MeshRecipe::Torus {
                width: 1.0,
                height: 0.5,
                nx: 3,
                ny: 3
            }
        );
        let d = MeshRecipe::Disk {
            refinement: 2,
            graded_rings: 1,
        };
        assert_eq!(
            d.refined(-5),
            MeshRecipe::Disk {
                refinement: 0,
                graded_rings: 1
            }
        );
    }
}
