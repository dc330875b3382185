use std::collections::{BTreeMap, HashMap};
use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::{cut_from_pieces, perturbed_partitions, CaseSpec, CheckSpec, ScenarioSpec};
use crate::eigen::{smallest_eigenpairs_with, EigenOptions, SolverStats, Spectrum};
use crate::error::{Error, Result};
use crate::export::{write_svg, write_vtk, write_vtk_edges, SvgScene, VtkData};
use crate::geometry::{norm, SurfaceMesh, Vec3};
use crate::homology::{
    are_homologous, exists_homologous_subset, is_relative_cycle, null_homologous, odd_points,
    verify_certificate, Cut,
};
use crate::operator::{assemble_cut_operator, DofMap};
use crate::report::{MeshSummary, REPORT_SCHEMA_VERSION};
use crate::spectral::{
    is_courant_sharp, nodal_partition, partition_energy_with, verify_min_inequality, CornerField,
    CourantReport, EnergyOptions, NodalPartition, Partition, DEFAULT_ZERO_TOL,
};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunOptions {
    /// Refinement levels added to every mesh recipe (negative coarsens).
    pub refine_delta: i32,
    pub tol: f64,
    pub seed: u64,
    /// Threads for per-part energy solves; 0 means all cores.
    pub jobs: usize,
    pub zero_tol: f64,
    /// Directory for VTK/SVG exports of computed eigenvectors; `None` disables them.
    pub export_dir: Option<PathBuf>,
    pub vtk: bool,
    pub svg: bool,
    /// Also run one level coarser and flag checks whose error grew.
    pub trend: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            refine_delta: 0,
            tol: 1e-8,
            seed: 0,
            jobs: 0,
            zero_tol: DEFAULT_ZERO_TOL,
            export_dir: None,
            vtk: false,
            svg: false,
            trend: false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckStatus {
    Pass,
    Fail,
    Error,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub kind: String,
    pub status: CheckStatus,
    pub measured: Option<f64>,
    pub expected: Option<f64>,
    pub tolerance: Option<f64>,
    pub provenance: Option<String>,
    pub detail: String,
}

impl CheckResult {
    fn new(kind: &str, pass: bool, detail: String) -> Self {
        CheckResult {
            kind: kind.to_string(),
            status: if pass {
                CheckStatus::Pass
            } else {
                CheckStatus::Fail
            },
            measured: None,
            expected: None,
            tolerance: None,
            provenance: None,
            detail,
        }
    }

    fn values(mut self, measured: f64, expected: Option<f64>, tolerance: Option<f64>) -> Self {
        self.measured = Some(measured);
        self.expected = expected;
        self.tolerance = tolerance;
        self
    }

    pub fn passed(&self) -> bool {
        self.status == CheckStatus::Pass
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CaseReport {
    pub label: String,
    pub mesh: Option<MeshSummary>,
    pub operator: Option<String>,
    pub eigenvalues: Vec<f64>,
    pub residuals: Vec<f64>,
    pub trailing: Vec<f64>,
    pub solver: Option<SolverStats>,
    /// Nodal count and spectral position of every computed eigenvector.
    pub courant: Vec<CourantReport>,
    pub checks: Vec<CheckResult>,
    /// Stage failure that prevented some checks from running.
    pub error: Option<String>,
    /// Files written for this case.
    pub exports: Vec<String>,
    pub elapsed_s: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioReport {
    pub schema_version: u32,
    pub kind: String,
    pub name: String,
    pub description: String,
    pub anchor: String,
    pub refine_delta: i32,
    pub passed: bool,
    pub cases: Vec<CaseReport>,
    /// Checks whose distance to the reference grew under refinement; `None`
    /// unless the trend was requested. Flags never affect `passed`.
    pub trend: Option<Vec<TrendFlag>>,
    pub elapsed_s: f64,
}

/// A check that moved away from its reference value under refinement.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrendFlag {
    pub case: String,
    pub check: String,
    pub coarse_error: f64,
    pub fine_error: f64,
}

/// Allowed growth of a check's error from one refinement level to the next.
pub const TREND_FACTOR: f64 = 1.5;

/// Compare checks with a reference value, case by case and in order, between
/// a run and the same run one level coarser.
pub fn refinement_trend(coarse: &[CaseReport], fine: &[CaseReport]) -> Vec<TrendFlag> {
    let mut flags = Vec::new();
    for f in fine {
        let Some(c) = coarse.iter().find(|c| c.label == f.label) else {
            continue;
        };
        for (fc, cc) in f
            .checks
            .iter()
            .zip(&c.checks)
            .filter(|(a, b)| a.kind == b.kind)
        {
            let err = |r: &CheckResult| Some((r.measured? - r.expected?).abs());
            let (Some(ef), Some(ec)) = (err(fc), err(cc)) else {
                continue;
            };
            let floor = 1e-12 * fc.expected.unwrap_or(0.0).abs().max(1.0);
            if ef > TREND_FACTOR * ec && ef > floor {
                flags.push(TrendFlag {
                    case: f.label.clone(),
                    check: fc.kind.clone(),
                    coarse_error: ec,
                    fine_error: ef,
                });
            }
        }
    }
    flags
}

impl ScenarioReport {
    pub fn checks(&self) -> impl Iterator<Item = &CheckResult> {
        self.cases.iter().flat_map(|c| c.checks.iter())
    }

    /// True if some check failed because of a numerical breakdown.
    pub fn numerical_failure(&self) -> bool {
        self.cases.iter().any(|c| {
            c.error
                .as_deref()
                .is_some_and(|e| e.starts_with("numerical:"))
        })
    }
}

/// Run every case of a scenario. Stage failures are recorded per check and
/// never abort the run.
pub fn run_scenario(spec: &ScenarioSpec, opts: &RunOptions) -> ScenarioReport {
    let start = Instant::now();
    let cases: Vec<CaseReport> = spec
        .cases
        .iter()
        .map(|c| run_case(&spec.name, c, opts))
        .collect();
    let passed = cases
        .iter()
        .all(|c| c.checks.iter().all(CheckResult::passed) && c.error.is_none());
    let trend = opts.trend.then(|| {
        let coarse_opts = RunOptions {
            refine_delta: opts.refine_delta - 1,
            export_dir: None,
            trend: false,
            ..opts.clone()
        };
        let coarse: Vec<CaseReport> = spec
            .cases
            .iter()
            .map(|c| run_case(&spec.name, c, &coarse_opts))
            .collect();
        refinement_trend(&coarse, &cases)
    });
    ScenarioReport {
        schema_version: REPORT_SCHEMA_VERSION,
        kind: "scenario".into(),
        name: spec.name.clone(),
        description: spec.description.clone(),
        anchor: spec.anchor.clone(),
        refine_delta: opts.refine_delta,
        passed,
        cases,
        trend,
        elapsed_s: start.elapsed().as_secs_f64(),
    }
}

fn stage_error(e: &Error) -> String {
    if e.is_numerical() {
        format!("numerical: {e}")
    } else {
        e.to_string()
    }
}

struct Solved {
    spectrum: Spectrum,
    dofs: DofMap,
    cut: Cut,
}

struct Ctx<'a> {
    case: &'a CaseSpec,
    mesh: SurfaceMesh,
    opts: &'a RunOptions,
    cuts: BTreeMap<String, std::result::Result<Cut, String>>,
    partitions: BTreeMap<String, std::result::Result<Partition, String>>,
    solved: Option<std::result::Result<Solved, String>>,
    nodal: HashMap<usize, NodalPartition>,
}

impl Ctx<'_> {
    fn cut(&self, name: &str) -> Result<&Cut> {
        match self.cuts.get(name) {
            Some(Ok(c)) => Ok(c),
            Some(Err(e)) => Err(Error::InvalidParameter(format!("cut `{name}`: {e}"))),
            None => Err(Error::InvalidParameter(format!("unknown cut `{name}`"))),
        }
    }

    fn partition(&self, name: &str) -> Result<&Partition> {
        match self.partitions.get(name) {
            Some(Ok(p)) => Ok(p),
            Some(Err(e)) => Err(Error::InvalidParameter(format!("partition `{name}`: {e}"))),
            None => Err(Error::InvalidParameter(format!(
                "unknown partition `{name}`"
            ))),
        }
    }

    fn solved(&self) -> Result<&Solved> {
        match &self.solved {
            Some(Ok(s)) => Ok(s),
            Some(Err(e)) => Err(Error::InvalidParameter(format!(
                "spectral stage failed: {e}"
            ))),
            None => Err(Error::InvalidParameter("case computes no spectrum".into())),
        }
    }

    fn energy_opts(&self) -> EnergyOptions {
        EnergyOptions {
            jobs: self.opts.jobs,
            tol: self.opts.tol,
            seed: self.opts.seed,
        }
    }

    fn nodal(&mut self, index: usize) -> Result<&NodalPartition> {
        if !self.nodal.contains_key(&index) {
            let s = self.solved()?;
            let field = CornerField::from_spectrum(&self.mesh, &s.dofs, &s.spectrum, index - 1)?;
            let np = nodal_partition(&self.mesh, &s.cut, &field, self.opts.zero_tol)?;
            self.nodal.insert(index, np);
        }
        Ok(&self.nodal[&index])
    }

    fn lambda(&self, index: usize) -> Result<f64> {
        self.solved()?
            .spectrum
            .eigenvalues
            .get(index - 1)
            .copied()
            .ok_or_else(|| Error::OutOfRange(format!("eigenvalue {index}")))
    }
}

fn run_case(scenario: &str, case: &CaseSpec, opts: &RunOptions) -> CaseReport {
    let start = Instant::now();
    let mut report = CaseReport {
        label: case.label.clone(),
        mesh: None,
        operator: case.operator.clone(),
        eigenvalues: vec![],
        residuals: vec![],
        trailing: vec![],
        solver: None,
        courant: vec![],
        checks: vec![],
        error: None,
        exports: vec![],
        elapsed_s: 0.0,
    };
    let mesh = match case.mesh.refined(opts.refine_delta).build() {
        Ok(m) => m,
        Err(e) => {
            let msg = stage_error(&e);
            report.checks = case
                .checks
                .iter()
                .map(|c| CheckResult {
                    status: CheckStatus::Error,
                    ..CheckResult::new(c.kind(), false, msg.clone())
                })
                .collect();
            report.error = Some(msg);
            return report;
        }
    };
    report.mesh = Some(MeshSummary::of(&mesh));
    let cuts = case
        .cuts
        .iter()
        .map(|(name, pieces)| {
            (
                name.clone(),
                cut_from_pieces(&mesh, pieces).map_err(|e| stage_error(&e)),
            )
        })
        .collect();
    let mut ctx = Ctx {
        case,
        mesh,
        opts,
        cuts,
        partitions: BTreeMap::new(),
        solved: None,
        nodal: HashMap::new(),
    };
    ctx.partitions = case
        .partitions
        .iter()
        .map(|(name, recipe)| {
            let p = (|| {
                let mut walls = std::collections::BTreeSet::new();
                for w in &recipe.walls {
                    walls.extend(ctx.cut(w)?.edges().iter().copied());
                }
                Partition::from_walls(&ctx.mesh, &walls)
            })();
            (name.clone(), p.map_err(|e| stage_error(&e)))
        })
        .collect();

    if case.k > 0 {
        let solved = (|| -> Result<Solved> {
            let cut = match &case.operator {
                Some(name) => ctx.cut(name)?.clone(),
                None => Cut::empty(&ctx.mesh),
            };
            let (k, m, dofs) = assemble_cut_operator(&ctx.mesh, &cut)?;
            let eopts = EigenOptions {
                tol: opts.tol,
                seed: opts.seed,
                ..EigenOptions::default()
            };
            let spectrum = smallest_eigenpairs_with(&k, &m, case.k, &eopts)?;
            Ok(Solved {
                spectrum,
                dofs,
                cut,
            })
        })();
        match solved {
            Ok(s) => {
                report.eigenvalues = s.spectrum.eigenvalues.clone();
                report.residuals = s.spectrum.residuals.clone();
                report.trailing = s.spectrum.trailing.clone();
                report.solver = Some(s.spectrum.stats.clone());
                for i in 1..=s.spectrum.len() {
                    match is_courant_sharp(
                        &ctx.mesh,
                        &s.cut,
                        &s.dofs,
                        &s.spectrum,
                        i,
                        opts.zero_tol,
                    ) {
                        Ok(c) => report.courant.push(c),
                        Err(e) => report.error = Some(stage_error(&e)),
                    }
                }
                if let Some(dir) = &opts.export_dir {
                    match export_case(
                        &ctx.mesh,
                        &s,
                        dir,
                        &format!("{scenario}-{}", case.label),
                        opts,
                    ) {
                        Ok(files) => report.exports = files,
                        Err(e) => report.error = Some(format!("export: {e}")),
                    }
                }
                ctx.solved = Some(Ok(s));
            }
            Err(e) => {
                report.error = Some(stage_error(&e));
                ctx.solved = Some(Err(stage_error(&e)));
            }
        }
    }

    for check in &case.checks {
        let r = evaluate(&mut ctx, check).unwrap_or_else(|e| CheckResult {
            status: CheckStatus::Error,
            ..CheckResult::new(check.kind(), false, stage_error(&e))
        });
        report.checks.push(r);
    }
    report.elapsed_s = start.elapsed().as_secs_f64();
    report
}

fn file_stem(s: &str) -> String {
    s.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '-' || c == '.' {
                c
            } else {
                '_'
            }
        })
        .collect()
}

fn export_case(
    mesh: &SurfaceMesh,
    s: &Solved,
    dir: &Path,
    stem: &str,
    opts: &RunOptions,
) -> Result<Vec<String>> {
    std::fs::create_dir_all(dir)?;
    let stem = file_stem(stem);
    let mut files = Vec::new();
    let fields = (0..s.spectrum.len())
        .map(|i| CornerField::from_spectrum(mesh, &s.dofs, &s.spectrum, i))
        .collect::<Result<Vec<_>>>()?;
    if opts.vtk {
        let names: Vec<String> = (1..=fields.len()).map(|i| format!("u{i}")).collect();
        let data: Vec<VtkData> = names
            .iter()
            .zip(&fields)
            .map(|(n, f)| VtkData::Corner(n, f))
            .collect();
        let path = dir.join(format!("{stem}.vtk"));
        write_vtk(mesh, &stem, &data, BufWriter::new(File::create(&path)?))?;
        files.push(path.display().to_string());
        if !s.cut.is_empty() {
            let path = dir.join(format!("{stem}-cut.vtk"));
            write_vtk_edges(
                mesh,
                &stem,
                s.cut.edges().iter().copied(),
                BufWriter::new(File::create(&path)?),
            )?;
            files.push(path.display().to_string());
        }
    }
    if opts.svg && mesh.vertices().iter().all(|p| p[2] == 0.0) {
        for (i, f) in fields.iter().enumerate() {
            let path = dir.join(format!("{stem}-u{}.svg", i + 1));
            let scene = SvgScene {
                field: Some(f),
                cut: Some(&s.cut),
                ..Default::default()
            };
            write_svg(mesh, &scene, BufWriter::new(File::create(&path)?))?;
            files.push(path.display().to_string());
        }
    }
    Ok(files)
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

fn evaluate(ctx: &mut Ctx, check: &CheckSpec) -> Result<CheckResult> {
    let kind = check.kind();
    Ok(match check {
        CheckSpec::Eigenvalue {
            index,
            reference,
            rel_tol,
            provenance,
        } => {
            let lam = ctx.lambda(*index)?;
            let err = rel(lam, *reference);
            let mut r = CheckResult::new(
                kind,
                err <= *rel_tol,
                format!("λ{index} = {lam:.6}, reference {reference:.6}, relative error {err:.2e}"),
            )
            .values(lam, Some(*reference), Some(*rel_tol));
            r.provenance = Some(provenance.clone());
            r
        }
        CheckSpec::CourantSharp { index, expected } => {
            let s = ctx.solved()?;
            let c = is_courant_sharp(
                &ctx.mesh,
                &s.cut,
                &s.dofs,
                &s.spectrum,
                *index,
                ctx.opts.zero_tol,
            )?;
            CheckResult::new(
                kind,
                c.sharp == *expected,
                format!(
                    "eigenvector {index}: {} nodal domains, spectral position {}, sharp = {} (expected {expected})",
                    c.nodal_count, c.spectral_position, c.sharp
                ),
            )
            .values(c.nodal_count as f64, Some(c.spectral_position as f64), None)
        }
        CheckSpec::NodalParts {
            index,
            parts,
            area_tol,
        } => {
            let np = ctx.nodal(*index)?;
            let areas = np.partition.part_areas(&np.split.mesh)?;
            let mean = areas.iter().sum::<f64>() / areas.len().max(1) as f64;
            let dev = areas.iter().map(|a| rel(*a, mean)).fold(0.0, f64::max);
            CheckResult::new(
                kind,
                areas.len() == *parts && dev <= *area_tol,
                format!("{} parts (expected {parts}), areas {areas:.4?}, max relative deviation {dev:.2e}", areas.len()),
            )
            .values(dev, None, Some(*area_tol))
        }
        CheckSpec::NodalEnergy { index, max_margin } => {
            let lam = ctx.lambda(*index)?;
            let eo = ctx.energy_opts();
            let np = ctx.nodal(*index)?;
            let energy = partition_energy_with(&np.split.mesh, &np.partition, &eo)?.energy;
            let walls = np.partition.boundary_set(&np.split.mesh)?;
            let member = exists_homologous_subset(&np.split.mesh, &walls, &np.cut)?.is_some();
            let margin = (energy - lam) / lam;
            CheckResult::new(
                kind,
                member && margin.abs() <= *max_margin,
                format!(
                    "Λ(nodal) = {energy:.6}, λ{index} = {lam:.6}, margin {margin:.2e}, {} parts, in 𝒫_k(Γ): {member}",
                    np.partition.k()
                ),
            )
            .values(margin, Some(0.0), Some(*max_margin))
        }
        CheckSpec::PartitionEnergy {
            partition,
            reference,
            rel_tol,
            provenance,
        } => {
            let p = ctx.partition(partition)?;
            let e = partition_energy_with(&ctx.mesh, p, &ctx.energy_opts())?.energy;
            let err = rel(e, *reference);
            let mut r = CheckResult::new(
                kind,
                err <= *rel_tol,
                format!(
                    "Λ({partition}) = {e:.6}, reference {reference:.6}, relative error {err:.2e}"
                ),
            )
            .values(e, Some(*reference), Some(*rel_tol));
            r.provenance = Some(provenance.clone());
            r
        }
        CheckSpec::EnergyMatchesEigenvalue {
            partition,
            index,
            rel_tol,
        } => {
            let lam = ctx.lambda(*index)?;
            let p = ctx.partition(partition)?;
            let e = partition_energy_with(&ctx.mesh, p, &ctx.energy_opts())?.energy;
            let err = rel(e, lam).max(rel(lam, e));
            CheckResult::new(
                kind,
                err <= *rel_tol,
                format!("Λ({partition}) = {e:.6}, λ{index} = {lam:.6}, relative gap {err:.2e}"),
            )
            .values(e, Some(lam), Some(*rel_tol))
        }
        CheckSpec::Member {
            partition,
            cut,
            expected,
        } => {
            let target = match cut {
                Some(c) => ctx.cut(c)?.clone(),
                None => ctx.solved()?.cut.clone(),
            };
            let p = ctx.partition(partition)?;
            let walls = p.boundary_set(&ctx.mesh)?;
            let found = exists_homologous_subset(&ctx.mesh, &walls, &target)?;
            CheckResult::new(
                kind,
                found.is_some() == *expected,
                match &found {
                    Some(s) => format!(
                        "boundary set of {partition} contains a homologous cut of {} edges",
                        s.len()
                    ),
                    None => format!(
                        "boundary set of {partition} contains no cut homologous to the target"
                    ),
                },
            )
        }
        CheckSpec::OddPoints { cut, count, near } => {
            let c = ctx.cut(cut)?;
            let odd = odd_points(&ctx.mesh, c)?;
            let reach = 2.0 * ctx.mesh.mean_edge_length();
            let located = near.iter().all(|p| {
                let q: Vec3 = [p[0], p[1], p.get(2).copied().unwrap_or(0.0)];
                odd.iter()
                    .any(|&v| norm(ctx.mesh.displacement(q, ctx.mesh.vertex(v))) <= reach)
            });
            let pos: Vec<Vec3> = odd.iter().map(|&v| ctx.mesh.vertex(v)).collect();
            CheckResult::new(
                kind,
                odd.len() == *count && located,
                format!("{} odd points (expected {count}) at {pos:.3?}", odd.len()),
            )
            .values(odd.len() as f64, Some(*count as f64), None)
        }
        CheckSpec::RelativeCycle { a, b, expected } => {
            let v = is_relative_cycle(&ctx.mesh, ctx.cut(a)?, ctx.cut(b)?)?;
            CheckResult::new(
                kind,
                v == *expected,
                format!("{a} + {b} is a relative cycle: {v} (expected {expected})"),
            )
        }
        CheckSpec::Homologous { a, b, expected } => {
            let (ca, cb) = (ctx.cut(a)?, ctx.cut(b)?);
            let cert = are_homologous(&ctx.mesh, ca, cb)?;
            let verified = verify_certificate(&ctx.mesh, &ca.symmetric_difference(cb)?, &cert);
            CheckResult::new(
                kind,
                cert.verdict == *expected && verified,
                format!(
                    "{a} ~ {b}: {} (expected {expected}), certificate verified: {verified}{}",
                    cert.verdict,
                    cert.obstruction_note
                        .as_deref()
                        .map(|n| format!(", {n}"))
                        .unwrap_or_default()
                ),
            )
        }
        CheckSpec::NullHomologous { cut, expected } => {
            let c = ctx.cut(cut)?;
            let cert = null_homologous(&ctx.mesh, c)?;
            let verified = verify_certificate(&ctx.mesh, c, &cert);
            CheckResult::new(
                kind,
                cert.verdict == *expected && verified,
                format!("{cut} null homologous: {} (expected {expected}), certificate verified: {verified}", cert.verdict),
            )
        }
        CheckSpec::SpectralSeparation {
            a,
            b,
            index,
            min_rel_diff,
        } => {
            let eopts = EigenOptions {
                tol: ctx.opts.tol,
                seed: ctx.opts.seed,
                ..EigenOptions::default()
            };
            let mut lams = [0.0; 2];
            for (slot, name) in lams.iter_mut().zip([a, b]) {
                let (k, m, _) = assemble_cut_operator(&ctx.mesh, ctx.cut(name)?)?;
                *slot = smallest_eigenpairs_with(&k, &m, *index, &eopts)?.eigenvalues[index - 1];
            }
            let d = (lams[0] - lams[1]).abs() / lams[0].min(lams[1]);
            CheckResult::new(
                kind,
                d > *min_rel_diff,
                format!(
                    "λ{index}({a}) = {:.6}, λ{index}({b}) = {:.6}, relative difference {d:.2e}",
                    lams[0], lams[1]
                ),
            )
            .values(d, None, Some(*min_rel_diff))
        }
        CheckSpec::MinInequality {
            family,
            samples,
            seed,
            jitter,
            amplitude,
            slack,
        } => {
            let k = ctx.case.k;
            let lam = ctx.lambda(k)?;
            let parts =
                perturbed_partitions(&ctx.mesh, *family, k, *samples, *seed, *jitter, *amplitude)?;
            let cut = ctx.solved()?.cut.clone();
            let rep =
                verify_min_inequality(&ctx.mesh, &cut, lam, &parts, *slack, &ctx.energy_opts())?;
            let members = rep.entries.iter().filter(|e| e.member).count();
            let min_margin = rep
                .entries
                .iter()
                .map(|e| e.margin)
                .fold(f64::INFINITY, f64::min);
            CheckResult::new(
                kind,
                members == parts.len() && rep.violations() == 0,
                format!(
                    "{members}/{} members, {} violations, smallest margin {min_margin:.3e} against λ{k} = {lam:.6}",
                    parts.len(),
                    rep.violations()
                ),
            )
            .values(min_margin, Some(0.0), Some(*slack))
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn case(label: &str, measured: &[f64]) -> CaseReport {
        CaseReport {
            label: label.into(),
            mesh: None,
            operator: None,
            eigenvalues: vec![],
            residuals: vec![],
            trailing: vec![],
            solver: None,
            courant: vec![],
            checks: measured
                .iter()
                .map(|&m| {
                    CheckResult::new("eigenvalue", true, String::new()).values(
                        m,
                        Some(10.0),
                        Some(0.1),
                    )
                })
                .collect(),
            error: None,
            exports: vec![],
            elapsed_s: 0.0,
        }
    }

    #[test]
    fn trend_flags_only_growing_errors() {
        let coarse = [case("a", &[10.4, 10.2]), case("b", &[9.0])];
        let fine = [
            case("a", &[10.1, 10.5]),
            case("b", &[9.4]),
            case("c", &[20.0]),
        ];
        let flags = refinement_trend(&coarse, &fine);
        assert_eq!(flags.len(), 1);
        assert_eq!(flags[0].case, "a");
        assert!(
            (flags[0].fine_error - 0.5).abs() < 1e-12
                && (flags[0].coarse_error - 0.2).abs() < 1e-12
        );
        assert!(refinement_trend(&fine, &fine).is_empty());
    }
}
