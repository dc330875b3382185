use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use cutlap::eigen::{smallest_eigenpairs_with, EigenOptions};
use cutlap::export::{write_svg, write_vtk, write_vtk_edges, SvgScene, VtkData};
use cutlap::geometry::{read_mesh, write_mesh, SurfaceMesh};
use cutlap::homology::{read_cut, write_cut, Cut};
use cutlap::operator::assemble_cut_operator;
use cutlap::report::{EnergyFileReport, HomologyReport, MeshReport, SpectrumReport, SuiteReport};
use cutlap::scenarios::{
    cut_from_pieces, list_scenarios, run_scenario, scenario, CutPiece, MeshRecipe, RunOptions,
    ScenarioReport,
};
use cutlap::spectral::{read_partition, CornerField, EnergyOptions, DEFAULT_ZERO_TOL};
use cutlap::Error;

/// Partition Laplacians on triangulated surfaces.
///
/// Exit status: 0 success, 1 a check failed, 2 usage or input error,
/// 3 numerical failure.
#[derive(Parser, Debug)]
#[command(name = "cutlap", version)]
struct Cli {
    /// Directory for reports and exports.
    #[arg(long, global = true, env = "CUTLAP_OUT", default_value = "cutlap-out")]
    out: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a canonical mesh (and optionally a cut on it).
    Mesh(MeshArgs),
    /// Odd points, relative-cycle and homology verdicts for one or two cuts.
    Homology(HomologyArgs),
    /// Smallest eigenpairs of the cut operator with nodal counts.
    Spectrum(SpectrumArgs),
    /// Per-part Dirichlet eigenvalues and the energy of a partition.
    Energy(EnergyArgs),
    /// Run registered scenarios.
    Scenario(ScenarioArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SurfaceArg {
    Disk,
    Sphere,
    Rectangle,
    Cylinder,
    Torus,
    Annulus,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Grading {
    Origin,
}

#[derive(Args, Debug)]
struct MeshArgs {
    #[arg(long, value_enum)]
    surface: SurfaceArg,
    /// Subdivision level (disk, sphere).
    #[arg(long, default_value_t = 4)]
    refine: usize,
    /// Extra refinement rings around a point (disk).
    #[arg(long, value_enum)]
    graded: Option<Grading>,
    #[arg(long, default_value_t = 3)]
    rings: usize,
    /// Chart width (rectangle, cylinder, torus).
    #[arg(long, default_value_t = 1.0)]
    width: f64,
    /// Chart height b (rectangle, cylinder, torus).
    #[arg(long = "b", default_value_t = 1.0)]
    height: f64,
    #[arg(long, default_value_t = 64)]
    nx: usize,
    #[arg(long, default_value_t = 64)]
    ny: usize,
    /// Annulus radii and resolution.
    #[arg(long, default_value_t = 1.0)]
    inner: f64,
    #[arg(long, default_value_t = 2.0)]
    outer: f64,
    #[arg(long, default_value_t = 128)]
    n_theta: usize,
    #[arg(long, default_value_t = 32)]
    n_r: usize,
    /// Cut curve snapped to the mesh, e.g. `ray:90` or `segment:0.5,0:0.5,1` (repeatable).
    #[arg(long = "cut")]
    cuts: Vec<CutPiece>,
    /// Where to write the cut built from `--cut`.
    #[arg(long, requires = "cuts")]
    cut_out: Option<PathBuf>,
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Args, Debug)]
struct HomologyArgs {
    #[arg(long)]
    mesh: PathBuf,
    /// One or two cut files.
    #[arg(long = "cut", required = true, num_args = 1, action = clap::ArgAction::Append)]
    cuts: Vec<PathBuf>,
}

#[derive(Args, Debug)]
struct SolveArgs {
    /// Relative residual target of the eigensolver.
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug)]
struct SpectrumArgs {
    #[arg(long)]
    mesh: PathBuf,
    /// Cut file; omitted means the plain Dirichlet Laplacian.
    #[arg(long)]
    cut: Option<PathBuf>,
    #[arg(short, long, default_value_t = 5)]
    k: usize,
    /// Fraction of the maximum below which a value counts as zero in nodal counts.
    #[arg(long, default_value_t = DEFAULT_ZERO_TOL)]
    zero_tol: f64,
    #[command(flatten)]
    solve: SolveArgs,
    /// Iteration cap of the eigensolver.
    #[arg(long, default_value_t = EigenOptions::default().max_iterations)]
    max_iterations: usize,
    /// Write eigenvectors as VTK (per-corner scalars).
    #[arg(long)]
    vtk: bool,
    /// Write SVG nodal sketches (planar charts only).
    #[arg(long)]
    svg: bool,
}

#[derive(Args, Debug)]
struct EnergyArgs {
    #[arg(long)]
    mesh: PathBuf,
    #[arg(long)]
    partition: PathBuf,
    /// Cut to test membership of the partition against.
    #[arg(long)]
    target: Option<PathBuf>,
    /// Threads for per-part solves; 0 means all cores.
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    #[command(flatten)]
    solve: SolveArgs,
    /// Write part labels and the field-free mesh as VTK.
    #[arg(long)]
    vtk: bool,
    /// Write a part sketch as SVG (planar charts only).
    #[arg(long)]
    svg: bool,
}

#[derive(Args, Debug)]
#[command(group(clap::ArgGroup::new("which").required(true).args(["name", "all", "list"])))]
struct ScenarioArgs {
    #[arg(long)]
    name: Option<String>,
    #[arg(long)]
    all: bool,
    /// Print the catalog.
    #[arg(long)]
    list: bool,
    /// Refinement levels relative to the default, e.g. `+1` or `-1`.
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    refine: i32,
    /// Worker threads; with `--all`, scenarios run concurrently.
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    #[command(flatten)]
    solve: SolveArgs,
    #[arg(long)]
    vtk: bool,
    #[arg(long)]
    svg: bool,
    /// Rerun one level coarser and flag checks that drift from their reference.
    #[arg(long)]
    trend: bool,
}

enum Failure {
    Check(String),
    Usage(String),
    Numerical(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_numerical() {
            Failure::Numerical(e.to_string())
        } else {
            Failure::Usage(e.to_string())
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

fn open(path: &Path) -> Result<BufReader<File>, Failure> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn create(path: &Path) -> Result<BufWriter<File>, Failure> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn load_mesh(path: &Path) -> Result<SurfaceMesh, Failure> {
    read_mesh(open(path)?).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn load_cut(mesh: &SurfaceMesh, path: &Path) -> Result<Cut, Failure> {
    read_cut(mesh, open(path)?).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn write_json(out: &Path, name: &str, value: &impl Serialize) -> Result<PathBuf, Failure> {
    let path = out.join(format!("{name}.json"));
    let mut w = create(&path)?;
    serde_json::to_writer_pretty(&mut w, value).map_err(|e| Failure::Usage(e.to_string()))?;
    writeln!(w)?;
    w.flush()?;
    Ok(path)
}

fn cmd_mesh(args: &MeshArgs) -> Outcome {
    let recipe = match args.surface {
        SurfaceArg::Disk => MeshRecipe::Disk {
            refinement: args.refine,
            graded_rings: if args.graded.is_some() { args.rings } else { 0 },
        },
        SurfaceArg::Sphere => MeshRecipe::Sphere {
            refinement: args.refine,
        },
        SurfaceArg::Rectangle => MeshRecipe::Rectangle {
            width: args.width,
            height: args.height,
            nx: args.nx,
            ny: args.ny,
        },
        SurfaceArg::Cylinder => MeshRecipe::Cylinder {
            width: args.width,
            height: args.height,
            nx: args.nx,
            ny: args.ny,
        },
        SurfaceArg::Torus => MeshRecipe::Torus {
            width: args.width,
            height: args.height,
            nx: args.nx,
            ny: args.ny,
        },
        SurfaceArg::Annulus => MeshRecipe::Annulus {
            inner: args.inner,
            outer: args.outer,
            n_theta: args.n_theta,
            n_r: args.n_r,
        },
    };
    let mesh = recipe.build()?;
    let mut w = create(&args.output)?;
    write_mesh(&mesh, &mut w)?;
    w.flush()?;
    let r = MeshReport::new(&mesh);
    println!(
        "{} mesh: V={} E={} F={} χ={} area={:.6} boundary edges={} → {}",
        r.mesh.surface,
        r.mesh.vertices,
        r.mesh.edges,
        r.mesh.triangles,
        r.mesh.euler,
        r.mesh.area,
        r.mesh.boundary_edges,
        args.output.display()
    );
    if let Some(path) = &args.cut_out {
        let cut = cut_from_pieces(&mesh, &args.cuts)?;
        let mut w = create(path)?;
        write_cut(&mesh, &cut, &mut w)?;
        w.flush()?;
        println!("cut: {} edges → {}", cut.len(), path.display());
    }
    Ok(())
}

fn cmd_homology(out: &Path, args: &HomologyArgs) -> Outcome {
    if args.cuts.len() > 2 {
        return Err(Failure::Usage("homology takes one or two cuts".into()));
    }
    let mesh = load_mesh(&args.mesh)?;
    let cuts = args
        .cuts
        .iter()
        .map(|p| Ok((p.display().to_string(), load_cut(&mesh, p)?)))
        .collect::<Result<Vec<_>, Failure>>()?;
    let r = HomologyReport::new(&mesh, &cuts)?;
    for c in &r.cuts {
        println!(
            "{}: {} edges, odd points {:?}, null homologous: {}",
            c.name, c.edges, c.odd_points, c.null_homologous.verdict
        );
    }
    if let Some(cmp) = &r.comparison {
        println!("relative_cycle: {}", cmp.relative_cycle);
        println!("homologous: {}", cmp.homologous.verdict);
    }
    let path = write_json(out, "homology", &r)?;
    println!("report → {}", path.display());
    Ok(())
}

fn cmd_spectrum(out: &Path, args: &SpectrumArgs) -> Outcome {
    if args.k == 0 {
        return Err(Failure::Usage("k must be positive".into()));
    }
    let mesh = load_mesh(&args.mesh)?;
    let cut = match &args.cut {
        Some(p) => load_cut(&mesh, p)?,
        None => Cut::empty(&mesh),
    };
    let (k, m, dofs) = assemble_cut_operator(&mesh, &cut)?;
    let opts = EigenOptions {
        tol: args.solve.tol,
        seed: args.solve.seed,
        max_iterations: args.max_iterations,
        ..EigenOptions::default()
    };
    let spectrum = smallest_eigenpairs_with(&k, &m, args.k, &opts)?;
    let mut r = SpectrumReport::new(&mesh, &cut, &dofs, &spectrum, args.zero_tol)?;
    println!(
        "{} dofs, {} cut edges, {} odd points",
        r.dofs, r.cut_edges, r.odd_points
    );
    for c in &r.courant {
        println!(
            "λ{} = {:.8}  residual {:.1e}  nodal domains {}  position {}  courant_sharp: {}",
            c.index,
            c.eigenvalue,
            r.residuals[c.index - 1],
            c.nodal_count,
            c.spectral_position,
            c.sharp
        );
    }
    if args.vtk || args.svg {
        let fields = (0..spectrum.len())
            .map(|i| CornerField::from_spectrum(&mesh, &dofs, &spectrum, i))
            .collect::<Result<Vec<_>, _>>()?;
        if args.vtk {
            let names: Vec<String> = (1..=fields.len()).map(|i| format!("u{i}")).collect();
            let data: Vec<VtkData> = names
                .iter()
                .zip(&fields)
                .map(|(n, f)| VtkData::Corner(n, f))
                .collect();
            let path = out.join("spectrum.vtk");
            let mut w = create(&path)?;
            write_vtk(&mesh, "cutlap spectrum", &data, &mut w)?;
            w.flush()?;
            r.exports.push(path.display().to_string());
            if !cut.is_empty() {
                let path = out.join("cut.vtk");
                let mut w = create(&path)?;
                write_vtk_edges(&mesh, "cutlap cut", cut.edges().iter().copied(), &mut w)?;
                w.flush()?;
                r.exports.push(path.display().to_string());
            }
        }
        if args.svg {
            for (i, f) in fields.iter().enumerate() {
                let path = out.join(format!("spectrum-u{}.svg", i + 1));
                let mut w = create(&path)?;
                write_svg(
                    &mesh,
                    &SvgScene {
                        field: Some(f),
                        cut: Some(&cut),
                        ..Default::default()
                    },
                    &mut w,
                )?;
                w.flush()?;
                r.exports.push(path.display().to_string());
            }
        }
    }
    let path = write_json(out, "spectrum", &r)?;
    println!("report → {}", path.display());
    Ok(())
}

fn cmd_energy(out: &Path, args: &EnergyArgs) -> Outcome {
    let mesh = load_mesh(&args.mesh)?;
    let partition = read_partition(&mesh, open(&args.partition)?)
        .map_err(|e| Failure::Usage(format!("{}: {e}", args.partition.display())))?;
    let target = args
        .target
        .as_deref()
        .map(|p| load_cut(&mesh, p))
        .transpose()?;
    let opts = EnergyOptions {
        jobs: args.jobs,
        tol: args.solve.tol,
        seed: args.solve.seed,
    };
    let r = EnergyFileReport::new(&mesh, &partition, target.as_ref(), &opts)?;
    for p in &r.parts {
        println!(
            "part {}: area {:.6}, λ₁ = {:.8}",
            p.label, p.area, p.lambda1
        );
    }
    println!("Λ(P) = {:.8}", r.energy);
    if let Some(m) = &r.membership {
        println!("in_Pk: {}", m.in_pk);
    }
    if args.vtk {
        let labels: Vec<f64> = partition.labels().iter().map(|&l| l as f64).collect();
        let path = out.join("energy.vtk");
        let mut w = create(&path)?;
        write_vtk(
            &mesh,
            "cutlap partition",
            &[VtkData::Cell("label", &labels)],
            &mut w,
        )?;
        w.flush()?;
        println!("export → {}", path.display());
    }
    if args.svg {
        let path = out.join("energy.svg");
        let mut w = create(&path)?;
        write_svg(
            &mesh,
            &SvgScene {
                partition: Some(&partition),
                cut: target.as_ref(),
                ..Default::default()
            },
            &mut w,
        )?;
        w.flush()?;
        println!("export → {}", path.display());
    }
    let path = write_json(out, "energy", &r)?;
    println!("report → {}", path.display());
    Ok(())
}

fn print_catalog() {
    for s in list_scenarios() {
        println!("{:<24} {}", s.name, s.description);
    }
}

fn print_scenario(r: &ScenarioReport) {
    println!(
        "{} [{}] {:.2}s",
        r.name,
        if r.passed { "pass" } else { "FAIL" },
        r.elapsed_s
    );
    for c in &r.cases {
        if let Some(e) = &c.error {
            println!("  {}: error: {e}", c.label);
        }
        for ch in &c.checks {
            println!("  {}: {:?} {}: {}", c.label, ch.status, ch.kind, ch.detail);
        }
    }
    for f in r.trend.iter().flatten() {
        println!(
            "  {}: trend flag {}: error {:.3e} at this level vs {:.3e} one level coarser",
            f.case, f.check, f.fine_error, f.coarse_error
        );
    }
}

fn cmd_scenario(out: &Path, args: &ScenarioArgs) -> Outcome {
    if args.list {
        print_catalog();
        return Ok(());
    }
    let names: Vec<String> = match &args.name {
        Some(n) => vec![n.clone()],
        None => list_scenarios().into_iter().map(|s| s.name).collect(),
    };
    let specs = names
        .iter()
        .map(|n| {
            scenario(n).map_err(|e| {
                eprintln!("available scenarios:");
                for s in list_scenarios() {
                    eprintln!("  {}", s.name);
                }
                Failure::Usage(e.to_string())
            })
        })
        .collect::<Result<Vec<_>, Failure>>()?;
    let workers = match args.jobs {
        0 => std::thread::available_parallelism().map_or(1, |n| n.get()),
        n => n,
    };
    let concurrent = workers > 1 && specs.len() > 1;
    let opts = RunOptions {
        refine_delta: args.refine,
        tol: args.solve.tol,
        seed: args.solve.seed,
        jobs: if concurrent { 1 } else { args.jobs },
        export_dir: (args.vtk || args.svg).then(|| out.to_path_buf()),
        vtk: args.vtk,
        svg: args.svg,
        trend: args.trend,
        ..RunOptions::default()
    };
    let start = Instant::now();
    let reports: Vec<ScenarioReport> = if concurrent {
        let next = std::sync::atomic::AtomicUsize::new(0);
        let mut slots: Vec<Option<ScenarioReport>> = vec![None; specs.len()];
        let done = std::sync::Mutex::new(&mut slots);
        std::thread::scope(|s| {
            for _ in 0..workers.min(specs.len()) {
                s.spawn(|| loop {
                    let i = next.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                    let Some(spec) = specs.get(i) else { break };
                    let r = run_scenario(spec, &opts);
                    done.lock().expect("no worker panics")[i] = Some(r);
                });
            }
        });
        slots
            .into_iter()
            .map(|r| r.expect("every scenario ran"))
            .collect()
    } else {
        specs.iter().map(|s| run_scenario(s, &opts)).collect()
    };
    for r in &reports {
        print_scenario(r);
        let path = write_json(out, &format!("scenario-{}", r.name), r)?;
        println!("  report → {}", path.display());
    }
    let suite = SuiteReport::new(args.refine, reports, start.elapsed().as_secs_f64());
    if args.all {
        let path = write_json(out, "suite", &suite)?;
        println!("suite report → {}", path.display());
    }
    let failed: Vec<&str> = suite
        .scenarios
        .iter()
        .filter(|r| !r.passed)
        .map(|r| r.name.as_str())
        .collect();
    if suite
        .scenarios
        .iter()
        .any(ScenarioReport::numerical_failure)
    {
        Err(Failure::Numerical(format!(
            "numerical failure in {}",
            failed.join(", ")
        )))
    } else if !failed.is_empty() {
        Err(Failure::Check(format!("failed: {}", failed.join(", "))))
    } else {
        Ok(())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Mesh(a) => cmd_mesh(a),
        Command::Homology(a) => cmd_homology(&cli.out, a),
        Command::Spectrum(a) => cmd_spectrum(&cli.out, a),
        Command::Energy(a) => cmd_energy(&cli.out, a),
        Command::Scenario(a) => cmd_scenario(&cli.out, a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check(m)) => {
            eprintln!("cutlap: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(m)) => {
            eprintln!("cutlap: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Numerical(m)) => {
            eprintln!("cutlap: {m}");
            ExitCode::from(3)
        }
    }
}
