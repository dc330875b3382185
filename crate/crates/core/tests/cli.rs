use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

use cutlap::geometry::read_mesh;
use cutlap::homology::read_cut;
use cutlap::report::REPORT_SCHEMA;
use cutlap::spectral::{write_partition, Partition};

fn cutlap(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cutlap"))
        .current_dir(dir)
        .env("CUTLAP_OUT", dir.join("out"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn report(path: PathBuf) -> Value {
    let text = fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    let value: Value = serde_json::from_str(&text).unwrap();
    let schema: Value = serde_json::from_str(REPORT_SCHEMA).unwrap();
    let validator = jsonschema::validator_for(&schema).unwrap();
    let errors: Vec<String> = validator
        .iter_errors(&value)
        .map(|e| format!("{} at {}", e, e.instance_path()))
        .collect();
    assert!(
        errors.is_empty(),
        "{} does not validate: {errors:?}",
        path.display()
    );
    value
}

fn strip_timing(v: &mut Value) {
    match v {
        Value::Object(m) => {
            m.remove("elapsed_s");
            m.values_mut().for_each(strip_timing);
        }
        Value::Array(a) => a.iter_mut().for_each(strip_timing),
        _ => {}
    }
}

#[test]
fn mesh_summaries_and_files() {
    let dir = tempfile::tempdir().unwrap();
    let o = cutlap(
        dir.path(),
        &[
            "mesh",
            "--surface",
            "torus",
            "--b",
            "0.65",
            "--nx",
            "96",
            "--ny",
            "64",
            "-o",
            "t.mesh",
        ],
    );
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("χ=0"), "{}", stdout(&o));
    let mesh = read_mesh(fs::File::open(dir.path().join("t.mesh")).unwrap()).unwrap();
    assert_eq!(mesh.num_triangles(), 2 * 96 * 64);

    let o = cutlap(
        dir.path(),
        &[
            "mesh",
            "--surface",
            "disk",
            "--refine",
            "5",
            "--graded",
            "origin",
            "-o",
            "d.mesh",
        ],
    );
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("χ=1"));

    let o = cutlap(
        dir.path(),
        &[
            "mesh",
            "--surface",
            "sphere",
            "--refine",
            "5",
            "-o",
            "s.mesh",
        ],
    );
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    let area: f64 = out
        .split("area=")
        .nth(1)
        .unwrap()
        .split_whitespace()
        .next()
        .unwrap()
        .parse()
        .unwrap();
    assert!((area - 4.0 * PI).abs() / (4.0 * PI) < 1e-3, "{out}");

    let o = cutlap(
        dir.path(),
        &[
            "mesh",
            "--surface",
            "cylinder",
            "--nx",
            "2",
            "-o",
            "bad.mesh",
        ],
    );
    assert_eq!(code(&o), 2);
    let o = cutlap(
        dir.path(),
        &[
            "mesh",
            "--surface",
            "disk",
            "--cut",
            "spiral:3",
            "--cut-out",
            "c.cut",
            "-o",
            "x.mesh",
        ],
    );
    assert_eq!(code(&o), 2);
}

#[test]
fn homology_verdicts() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let ok = |args: &[&str]| assert_eq!(code(&cutlap(d, args)), 0, "{args:?}");
    ok(&[
        "mesh",
        "--surface",
        "disk",
        "--refine",
        "5",
        "-o",
        "d.mesh",
        "--cut",
        "ray:90",
        "--cut",
        "ray:210",
        "--cut",
        "ray:330",
        "--cut-out",
        "p.cut",
    ]);
    ok(&[
        "mesh",
        "--surface",
        "disk",
        "--refine",
        "5",
        "-o",
        "d.mesh",
        "--cut",
        "ray:90",
        "--cut-out",
        "g2.cut",
    ]);
    ok(&[
        "mesh",
        "--surface",
        "disk",
        "--refine",
        "5",
        "-o",
        "d.mesh",
        "--cut",
        "segment:0,-0.25:0,-1",
        "--cut-out",
        "g3.cut",
    ]);

    ok(&[
        "homology", "--mesh", "d.mesh", "--cut", "p.cut", "--cut", "g3.cut",
    ]);
    let r = report(d.join("out/homology.json"));
    assert_eq!(r["comparison"]["homologous"]["verdict"], false);
    assert_eq!(r["comparison"]["relative_cycle"], false);

    ok(&[
        "homology", "--mesh", "d.mesh", "--cut", "p.cut", "--cut", "g2.cut",
    ]);
    let r = report(d.join("out/homology.json"));
    assert_eq!(r["comparison"]["homologous"]["verdict"], true);
    assert_eq!(r["comparison"]["homologous"]["verified"], true);

    ok(&[
        "homology", "--mesh", "d.mesh", "--cut", "g2.cut", "--cut", "g2.cut",
    ]);
    let r = report(d.join("out/homology.json"));
    assert_eq!(r["comparison"]["homologous"]["verdict"], true);
    assert_eq!(
        r["comparison"]["homologous"]["witness"]["triangles"],
        Value::Array(vec![])
    );

    ok(&[
        "mesh",
        "--surface",
        "annulus",
        "--n-theta",
        "64",
        "--n-r",
        "8",
        "-o",
        "a.mesh",
        "--cut",
        "ray:90:1:2",
        "--cut-out",
        "one.cut",
    ]);
    ok(&[
        "mesh",
        "--surface",
        "annulus",
        "--n-theta",
        "64",
        "--n-r",
        "8",
        "-o",
        "a.mesh",
        "--cut",
        "ray:0:1:2",
        "--cut",
        "ray:90:1:2",
        "--cut",
        "ray:180:1:2",
        "--cut",
        "ray:270:1:2",
        "--cut-out",
        "four.cut",
    ]);
    ok(&[
        "homology", "--mesh", "a.mesh", "--cut", "one.cut", "--cut", "four.cut",
    ]);
    let r = report(d.join("out/homology.json"));
    assert_eq!(r["comparison"]["relative_cycle"], true);
    assert_eq!(r["comparison"]["homologous"]["verdict"], false);
    assert_eq!(r["cuts"][0]["odd_points"], Value::Array(vec![]));

    fs::write(d.join("broken.cut"), "cutlap-cut v1\n0 999999\n").unwrap();
    assert_eq!(
        code(&cutlap(
            d,
            &["homology", "--mesh", "d.mesh", "--cut", "broken.cut"]
        )),
        2
    );
}

#[test]
fn spectrum_reports_and_exports() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let ok = |args: &[&str]| assert_eq!(code(&cutlap(d, args)), 0, "{args:?}");

    ok(&[
        "mesh",
        "--surface",
        "cylinder",
        "--nx",
        "40",
        "--ny",
        "40",
        "-o",
        "c.mesh",
        "--cut",
        "segment:0.5,0:0.5,1",
        "--cut-out",
        "v.cut",
    ]);
    ok(&[
        "spectrum", "--mesh", "c.mesh", "--cut", "v.cut", "-k", "5", "--vtk", "--svg",
    ]);
    let r = report(d.join("out/spectrum.json"));
    let l1 = r["eigenvalues"][0].as_f64().unwrap();
    assert!(
        (l1 - 2.0 * PI * PI).abs() / (2.0 * PI * PI) < 0.01,
        "λ₁ = {l1}"
    );
    let exports = r["exports"].as_array().unwrap();
    assert_eq!(exports.len(), 2 + 5);
    for e in exports {
        assert!(Path::new(e.as_str().unwrap()).exists());
    }
    let vtk = fs::read_to_string(d.join("out/spectrum.vtk")).unwrap();
    assert!(vtk.starts_with("# vtk DataFile Version 3.0"));
    assert!(vtk.contains("SCALARS u5 double 1"));

    ok(&["mesh", "--surface", "disk", "--refine", "4", "-o", "d.mesh"]);
    ok(&["spectrum", "--mesh", "d.mesh", "-k", "1"]);
    let r = report(d.join("out/spectrum.json"));
    let l1 = r["eigenvalues"][0].as_f64().unwrap();
    assert!(
        (l1 - 5.783185962946785).abs() / 5.783185962946785 < 0.01,
        "λ₁ = {l1}"
    );

    ok(&[
        "mesh",
        "--surface",
        "torus",
        "--b",
        "0.65",
        "--nx",
        "72",
        "--ny",
        "48",
        "-o",
        "t.mesh",
        "--cut",
        "segment:0,0:0,0.65",
        "--cut-out",
        "loop.cut",
    ]);
    ok(&[
        "spectrum", "--mesh", "t.mesh", "--cut", "loop.cut", "-k", "3",
    ]);
    let r = report(d.join("out/spectrum.json"));
    assert_eq!(r["courant"][2]["courant_sharp"], Value::Null);
    assert_eq!(r["courant"][2]["sharp"], true);

    let o = cutlap(
        d,
        &[
            "spectrum",
            "--mesh",
            "t.mesh",
            "--cut",
            "loop.cut",
            "-k",
            "3",
            "--max-iterations",
            "1",
        ],
    );
    assert_eq!(code(&o), 3, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(code(&cutlap(d, &["spectrum", "--mesh", "missing.mesh"])), 2);
    assert_eq!(
        code(&cutlap(
            d,
            &["spectrum", "--mesh", "t.mesh", "--svg-everything"]
        )),
        2
    );
}

#[test]
fn spectrum_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(
        code(&cutlap(
            d,
            &[
                "mesh",
                "--surface",
                "disk",
                "--refine",
                "3",
                "-o",
                "d.mesh",
                "--cut",
                "ray:0",
                "--cut-out",
                "s.cut"
            ]
        )),
        0
    );
    let mut runs = Vec::new();
    for out in ["a", "b"] {
        let o = cutlap(
            d,
            &[
                "--out", out, "spectrum", "--mesh", "d.mesh", "--cut", "s.cut", "-k", "6",
                "--seed", "4",
            ],
        );
        assert_eq!(code(&o), 0);
        runs.push(fs::read_to_string(d.join(out).join("spectrum.json")).unwrap());
    }
    assert_eq!(runs[0], runs[1]);
}

#[test]
fn energy_reports() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let ok = |args: &[&str]| assert_eq!(code(&cutlap(d, args)), 0, "{args:?}");

    ok(&[
        "mesh",
        "--surface",
        "disk",
        "--refine",
        "5",
        "--graded",
        "origin",
        "-o",
        "d.mesh",
        "--cut",
        "ray:90",
        "--cut",
        "ray:210",
        "--cut",
        "ray:330",
        "--cut-out",
        "m.cut",
    ]);
    ok(&[
        "mesh",
        "--surface",
        "disk",
        "--refine",
        "5",
        "--graded",
        "origin",
        "-o",
        "d.mesh",
        "--cut",
        "ray:90",
        "--cut-out",
        "spoke.cut",
    ]);
    let mesh = read_mesh(fs::File::open(d.join("d.mesh")).unwrap()).unwrap();
    let walls = read_cut(&mesh, fs::File::open(d.join("m.cut")).unwrap()).unwrap();
    let mercedes = Partition::from_walls(&mesh, walls.edges()).unwrap();
    write_partition(
        &mesh,
        &mercedes,
        fs::File::create(d.join("m.part")).unwrap(),
    )
    .unwrap();
    ok(&[
        "energy",
        "--mesh",
        "d.mesh",
        "--partition",
        "m.part",
        "--target",
        "spoke.cut",
        "--svg",
    ]);
    let r = report(d.join("out/energy.json"));
    let e = r["energy"].as_f64().unwrap();
    assert!(
        (e - 20.190728556426624).abs() / 20.190728556426624 < 0.03,
        "Λ = {e}"
    );
    assert_eq!(r["membership"]["in_Pk"], true);
    assert!(d.join("out/energy.svg").exists());

    let side = |t: usize, c: f64| {
        if mesh.triangle_centroid(t)[1] > c {
            1
        } else {
            2
        }
    };
    let halves = Partition::new(
        &mesh,
        (0..mesh.num_triangles()).map(|t| side(t, 0.0)).collect(),
    )
    .unwrap();
    write_partition(&mesh, &halves, fs::File::create(d.join("h.part")).unwrap()).unwrap();
    ok(&[
        "energy",
        "--mesh",
        "d.mesh",
        "--partition",
        "h.part",
        "--target",
        "spoke.cut",
    ]);
    let r = report(d.join("out/energy.json"));
    assert_eq!(r["membership"]["in_Pk"], true);
    assert!(r["membership"]["witness_edges"]
        .as_array()
        .is_some_and(|w| !w.is_empty()));

    let chord = Partition::new(
        &mesh,
        (0..mesh.num_triangles()).map(|t| side(t, 0.4)).collect(),
    )
    .unwrap();
    write_partition(&mesh, &chord, fs::File::create(d.join("c.part")).unwrap()).unwrap();
    ok(&[
        "energy",
        "--mesh",
        "d.mesh",
        "--partition",
        "c.part",
        "--target",
        "spoke.cut",
    ]);
    let r = report(d.join("out/energy.json"));
    assert_eq!(r["membership"]["in_Pk"], false);
    assert_eq!(r["membership"]["witness_edges"], Value::Null);

    ok(&[
        "mesh",
        "--surface",
        "rectangle",
        "--nx",
        "48",
        "--ny",
        "48",
        "-o",
        "sq.mesh",
    ]);
    let sq = read_mesh(fs::File::open(d.join("sq.mesh")).unwrap()).unwrap();
    let labels = (0..sq.num_triangles())
        .map(|t| {
            if sq.triangle_centroid(t)[0] < 0.5 {
                1
            } else {
                2
            }
        })
        .collect();
    write_partition(
        &sq,
        &Partition::new(&sq, labels).unwrap(),
        fs::File::create(d.join("sq.part")).unwrap(),
    )
    .unwrap();
    ok(&[
        "energy",
        "--mesh",
        "sq.mesh",
        "--partition",
        "sq.part",
        "--jobs",
        "2",
    ]);
    let r = report(d.join("out/energy.json"));
    let e = r["energy"].as_f64().unwrap();
    assert!(
        (e - 5.0 * PI * PI).abs() / (5.0 * PI * PI) < 0.02,
        "Λ = {e}"
    );

    fs::write(
        d.join("bad.part"),
        "cutlap-partition v1 k=2\nT 3\n1\n2\n1\n",
    )
    .unwrap();
    assert_eq!(
        code(&cutlap(
            d,
            &["energy", "--mesh", "sq.mesh", "--partition", "bad.part"]
        )),
        2
    );
}

#[test]
fn scenario_runs() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();

    let o = cutlap(d, &["scenario", "--list"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).lines().count(), 8);

    let o = cutlap(d, &["scenario", "--name", "no-such-thing"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("sphere-Y"));

    let o = cutlap(d, &["scenario", "--name", "sphere-Y", "--vtk"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let r = report(d.join("out/scenario-sphere-Y.json"));
    assert_eq!(r["passed"], true);
    assert_eq!(r["trend"], Value::Null);
    assert!(r["cases"][0]["exports"]
        .as_array()
        .is_some_and(|e| !e.is_empty()));

    let o = cutlap(d, &["scenario", "--name", "disk-fig2-homology", "--trend"]);
    assert_eq!(code(&o), 0);
    assert!(report(d.join("out/scenario-disk-fig2-homology.json"))["trend"].is_array());
    let o = cutlap(d, &["scenario", "--name", "disk-fig2-homology"]);
    assert_eq!(code(&o), 0);
    let mut first = report(d.join("out/scenario-disk-fig2-homology.json"));
    let o = cutlap(d, &["scenario", "--name", "disk-fig2-homology"]);
    assert_eq!(code(&o), 0);
    let mut second = report(d.join("out/scenario-disk-fig2-homology.json"));
    strip_timing(&mut first);
    strip_timing(&mut second);
    assert_eq!(first, second);

    // coarse meshes: some calibrated checks may fail, and the exit code must say so
    let o = cutlap(d, &["scenario", "--all", "--refine", "-1", "--jobs", "4"]);
    let suite = report(d.join("out/suite.json"));
    assert_eq!(suite["scenarios"].as_array().unwrap().len(), 8);
    assert_eq!(
        code(&o),
        if suite["passed"] == true { 0 } else { 1 },
        "{}",
        stdout(&o)
    );
}
