//! End-to-end runs of the `lcfpost` binary and of `cli::run`.

use std::path::{Path, PathBuf};
use std::process::Command;

use lcfpost::keyvalue;
use lcfpost::material::{read_material, MaterialParams};
use lcfpost::mesh::builders::hex_block;
use lcfpost::mesh::io::write_mesh;
use lcfpost::reliability::shape_from_pof;
use nalgebra::Vector3;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_lcfpost"))
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn summary(dir: &Path) -> Vec<keyvalue::Entry> {
    keyvalue::parse(&std::fs::read_to_string(dir.join("summary.txt")).unwrap()).unwrap()
}

fn value(entries: &[keyvalue::Entry], key: &str) -> f64 {
    keyvalue::parse_f64(keyvalue::get(entries, key).unwrap_or_else(|| panic!("missing {key}"))).unwrap()
}

#[test]
fn help_and_usage_errors() {
    assert_eq!(bin().arg("--help").status().unwrap().code(), Some(0));
    assert_eq!(bin().status().unwrap().code(), Some(1));
    assert_eq!(bin().args(["analyze", "--bogus"]).status().unwrap().code(), Some(1));
    let out = tempfile::tempdir().unwrap();
    let code = bin()
        .args(["analyze", "--mesh", s(&data("unit_cube.mesh")), "--material", s(&data("material.txt"))])
        .args(["--lq", "9", "--out", s(out.path())])
        .status()
        .unwrap()
        .code();
    assert_eq!(code, Some(1));
}

#[test]
fn malformed_and_missing_input_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let mesh = dir.path().join("bad.mesh");
    std::fs::write(&mesh, "NODES\n1 0 0 0\n2 1 zero 0\n").unwrap();
    let out = bin()
        .args(["analyze", "--mesh", s(&mesh), "--material", s(&data("material.txt")), "--out", s(dir.path())])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));

    let missing = dir.path().join("nope.mesh");
    let code = bin()
        .args(["analyze", "--mesh", s(&missing), "--material", s(&data("material.txt")), "--out", s(dir.path())])
        .status()
        .unwrap()
        .code();
    assert_eq!(code, Some(2));
}

#[test]
fn fully_degenerate_mesh_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let mut mesh = hex_block([1.0; 3], [1, 1, 1]);
    mesh.map_coordinates(|x| Vector3::new(x.x, x.y, 0.0));
    let path = dir.path().join("flat.mesh");
    write_mesh(&mesh, &path).unwrap();
    let code = bin()
        .args(["analyze", "--mesh", s(&path), "--material", s(&data("material.txt")), "--out", s(dir.path())])
        .status()
        .unwrap()
        .code();
    assert_eq!(code, Some(3));
}

#[test]
fn logs_go_to_stderr_only() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["-v", "analyze", "--config", s(&data("disk_run.toml")), "--out", s(dir.path())])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    assert!(String::from_utf8_lossy(&out.stderr).contains("eta ="));
}

#[test]
fn unit_cube_summary_matches_material_chain() {
    let dir = tempfile::tempdir().unwrap();
    let code = lcfpost::cli::run([
        "lcfpost",
        "analyze",
        "--mesh",
        s(&data("unit_cube.mesh")),
        "--material",
        s(&data("material.txt")),
        "--out",
        s(dir.path()),
    ]);
    assert_eq!(code, 0);
    let p = read_material(&data("material.txt")).unwrap();
    let n_det = lcfpost::material::life_scale_from_elastic_stress(450.0, &p).unwrap().cycles;
    let e = summary(dir.path());
    let eta = value(&e, "eta");
    assert!(((eta - n_det * 6f64.powf(-1.0 / p.weibull_shape)) / eta).abs() < 1e-10);
    assert_eq!(value(&e, "boundary_faces"), 6.0);
    assert!((value(&e, "boundary_area") - 6.0).abs() < 1e-12);
    assert!((value(&e, "top_5_share") - 5.0 / 6.0).abs() < 1e-12);
}

#[test]
fn segment_aggregation_through_summary() {
    let dir = tempfile::tempdir().unwrap();
    // shape chosen so that one segment fails with 6.142e-5 at N* = 0.01
    let n_star = 0.01;
    let m = shape_from_pof(6.142e-5, n_star);
    let mut p = MaterialParams::example();
    p.weibull_shape = m;
    let material = dir.path().join("material.txt");
    std::fs::write(&material, p.to_file_string()).unwrap();
    let code = lcfpost::cli::run([
        "lcfpost",
        "analyze",
        "--mesh",
        s(&data("unit_cube.mesh")),
        "--material",
        s(&material),
        "--segments",
        "44",
        "--report-nstar",
        "0.01",
        "--out",
        s(dir.path()),
    ]);
    assert_eq!(code, 0);
    let e = summary(dir.path());
    assert!((value(&e, "pof") / 6.142e-5 - 1.0).abs() < 1e-9);
    assert!((value(&e, "pof_segments") / 2.70e-3 - 1.0).abs() < 5e-3);
}

#[test]
fn convergence_constant_and_peaked_fields() {
    let dir = tempfile::tempdir().unwrap();
    let code = lcfpost::cli::run([
        "lcfpost",
        "convergence",
        "--mesh",
        s(&data("unit_cube.mesh")),
        "--material",
        s(&data("material.txt")),
        "--out",
        s(dir.path()),
    ]);
    assert_eq!(code, 0);
    let rows = |dir: &Path| -> Vec<f64> {
        std::fs::read_to_string(dir.join("convergence.csv"))
            .unwrap()
            .lines()
            .skip(1)
            .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
            .collect()
    };
    let constant = rows(dir.path());
    assert_eq!(constant.len(), 6);
    for eta in &constant {
        assert!((eta / constant[5] - 1.0).abs() < 1e-12);
    }

    let dir = tempfile::tempdir().unwrap();
    let code = lcfpost::cli::run(["lcfpost", "convergence", "--config", s(&data("disk_run.toml")), "--out", s(dir.path())]);
    assert_eq!(code, 0);
    let peaked = rows(dir.path());
    assert!((peaked[0] / peaked[5] - 1.0).abs() > 1e-2);
    assert!((peaked[3] / peaked[5] - 1.0).abs() < 1e-3);
}

#[test]
fn repeated_runs_are_bit_identical() {
    let run = |exec: &str| {
        let dir = tempfile::tempdir().unwrap();
        let code = lcfpost::cli::run([
            "lcfpost",
            "analyze",
            "--config",
            s(&data("disk_run.toml")),
            "--exec",
            exec,
            "--out",
            s(dir.path()),
        ]);
        assert_eq!(code, 0);
        dir
    };
    let (a, b, c) = (run("parallel"), run("parallel"), run("sequential"));
    for f in ["pof.csv", "faces.csv", "density.vtk", "summary.txt"] {
        let first = std::fs::read(a.path().join(f)).unwrap();
        assert_eq!(first, std::fs::read(b.path().join(f)).unwrap(), "{f}");
        assert_eq!(first, std::fs::read(c.path().join(f)).unwrap(), "{f}");
    }
}

fn calibrate(out: &Path, data_file: &Path, seed: &str) -> i32 {
    lcfpost::cli::run([
        "lcfpost",
        "calibrate",
        "--data",
        s(data_file),
        "--fixed",
        s(&data("calibration_fixed.txt")),
        "--seed",
        seed,
        "--restarts",
        "2",
        "--out",
        s(out),
    ])
}

#[test]
fn calibration_outputs_read_back_and_are_seed_deterministic() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    assert_eq!(calibrate(a.path(), &data("specimens.csv"), "3"), 0);
    assert_eq!(calibrate(b.path(), &data("specimens.csv"), "3"), 0);
    let fitted = read_material(&a.path().join("fitted_material.txt")).unwrap();
    assert!(fitted.weibull_shape >= 1.0 && fitted.cmb.b < 0.0 && fitted.cmb.c < 0.0);
    for f in ["fitted_material.txt", "fit_report.txt", "fit_trace.csv"] {
        assert_eq!(std::fs::read(a.path().join(f)).unwrap(), std::fs::read(b.path().join(f)).unwrap(), "{f}");
    }
    // a fitted parameter file drives an analysis directly
    let code = lcfpost::cli::run([
        "lcfpost",
        "analyze",
        "--mesh",
        s(&data("unit_cube.mesh")),
        "--material",
        s(&a.path().join("fitted_material.txt")),
        "--out",
        s(a.path()),
    ]);
    assert_eq!(code, 0);
}

#[test]
fn calibration_rejects_tiny_data_sets() {
    let dir = tempfile::tempdir().unwrap();
    let data_file = dir.path().join("few.csv");
    std::fs::write(&data_file, "n_cycles,strain_amplitude,gauge_area\n100,0.01,40\n1000,0.005,40\n").unwrap();
    let code = calibrate(dir.path(), &data_file, "0");
    assert_ne!(code, 0);
    assert!(!dir.path().join("fitted_material.txt").exists());
}
