//! End-to-end checks of the `umbilic` binary: exit codes, CSV shape, config files.

use std::path::PathBuf;
use std::process::{Command, Output};

fn umbilic(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_umbilic")).args(args).env_remove("UMBILIC_THREADS").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Header and data lines, after the `#` comment block.
fn csv_body(text: &str) -> Vec<&str> {
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("# quantity:"), "first line must name the quantity: {}", lines[0]);
    lines.into_iter().filter(|l| !l.starts_with('#')).collect()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("umbilic-cli-{}-{name}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn thm2_table_has_the_documented_columns() {
    let o = umbilic(&["verify", "thm2", "--field", "asym_bump", "--radii", "2,4"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let body = csv_body(&text);
    assert_eq!(body[0], "r,I_area,I_flux,majorant");
    assert_eq!(body.len(), 3);
    let cells: Vec<f64> = body[1].split(',').map(|c| c.parse().unwrap()).collect();
    assert_eq!(cells[0], 2.0);
    assert!((cells[1] - cells[2]).abs() < 1e-8);
}

#[test]
fn thm3_reports_stated_form_and_ratio() {
    let o = umbilic(&["verify", "thm3", "--field", "asym_bump", "--radii", "2"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(csv_body(&text)[0], "r,I_area,I_flux,majorant,I_stated,stated_ratio");
}

#[test]
fn unknown_flags_and_fields_are_usage_errors() {
    assert_eq!(umbilic(&["verify", "thm2", "--field", "asym_bump", "--bogus"]).status.code(), Some(1));
    assert_eq!(umbilic(&["decay", "--field", "no_such_field"]).status.code(), Some(1));
    assert_eq!(umbilic(&["contour", "--field", "saddle", "--nx", "1"]).status.code(), Some(1));
    assert_eq!(umbilic(&["--help"]).status.code(), Some(0));
}

#[test]
fn failed_graph_condition_exits_with_3() {
    let o = umbilic(&["invert", "graph", "--field", "sphere_cap", "--r0", "0.9"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("graph condition"));
}

#[test]
fn nonconvex_body_exits_with_3() {
    let o = umbilic(&["pipeline", "thm1", "--body", "axial:0.5"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn divergence_tolerance_breach_exits_with_3() {
    let ok = umbilic(&["verify", "divergence", "--field", "asym_bump", "--kind", "thm3"]);
    assert!(ok.status.success());
    let tight = umbilic(&["verify", "divergence", "--field", "asym_bump", "--kind", "thm3", "--tol", "1e-20"]);
    assert_eq!(tight.status.code(), Some(3));
    // the table is still written before the check fails
    assert_eq!(csv_body(&stdout(&tight))[0], "r,residual,residual_doubled");
}

#[test]
fn config_supplies_defaults_and_command_line_wins() {
    let dir = scratch("config");
    let cfg = dir.join("run.cfg");
    std::fs::write(&cfg, "# decay run\nfield = gaussian_bump\nradii = 2,4,8\nn-theta = 64\n").unwrap();
    let cfg = cfg.to_str().unwrap();
    let from_file = stdout(&umbilic(&["decay", "--config", cfg]));
    assert_eq!(csv_body(&from_file).len(), 4);
    assert!(from_file.contains("gaussian_bump"));
    let overridden = stdout(&umbilic(&["decay", "--config", cfg, "--radii", "3"]));
    let body = csv_body(&overridden);
    assert_eq!(body.len(), 2);
    assert!(body[1].starts_with("3,"));
    let missing = umbilic(&["decay", "--config", dir.join("absent.cfg").to_str().unwrap()]);
    assert_eq!(missing.status.code(), Some(1));
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn out_and_svg_files_are_written() {
    let dir = scratch("files");
    let csv = dir.join("map.csv");
    let svg = dir.join("map.svg");
    let o = umbilic(&[
        "contour",
        "--field",
        "asym_bump",
        "--nx",
        "41",
        "--ny",
        "41",
        "--out",
        csv.to_str().unwrap(),
        "--svg",
        svg.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(csv_body(&text)[0], "polyline,vertex,x,y,closed");
    assert!(std::fs::read_to_string(&svg).unwrap().contains("<path"));
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn every_command_starts_with_a_quantity_comment() {
    let runs: [&[&str]; 8] = [
        &["fields", "list"],
        &["curvature", "map", "--field", "saddle", "--nx", "5", "--ny", "5"],
        &["umbilic", "scan", "--field", "paraboloid", "--n", "21"],
        &["floor", "--field", "ridge", "--n", "21"],
        &["invert", "graph", "--field", "paraboloid", "--r0", "0.4", "--normalize", "--samples", "3"],
        &["pipeline", "thm1", "--body", "round"],
        &["decay", "--field", "inverse_quadratic"],
        &["verify", "thm2", "--field", "saddle", "--radii", "1"],
    ];
    for args in runs {
        let o = umbilic(args);
        assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        let text = stdout(&o);
        let body = csv_body(&text);
        let width = body[0].split(',').count();
        assert!(body.len() >= 2, "{args:?} produced no rows");
        assert!(body.iter().all(|l| l.split(',').count() == width || l.contains('"')), "{args:?}");
    }
}

#[test]
fn paraboloid_scan_reports_only_the_origin() {
    let text = stdout(&umbilic(&["umbilic", "scan", "--field", "paraboloid", "--n", "40"]));
    let body = csv_body(&text);
    assert_eq!(body.len(), 2);
    let cells: Vec<&str> = body[1].split(',').collect();
    let (x, y): (f64, f64) = (cells[0].parse().unwrap(), cells[1].parse().unwrap());
    assert!(x.hypot(y) < 1e-8);
    assert_eq!(cells[4], "true");
}

#[test]
fn sample_mode_is_reproducible_per_seed() {
    let a = umbilic(&["invert", "graph", "--field", "sphere_cap", "--r0", "0.5", "--samples", "20", "--seed", "3"]);
    let b = umbilic(&["invert", "graph", "--field", "sphere_cap", "--r0", "0.5", "--samples", "20", "--seed", "3"]);
    let c = umbilic(&["invert", "graph", "--field", "sphere_cap", "--r0", "0.5", "--samples", "20", "--seed", "4"]);
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
    let text = stdout(&a);
    for row in csv_body(&text).iter().skip(1) {
        let fbar: f64 = row.split(',').nth(3).unwrap().parse().unwrap();
        assert!((fbar - 0.5).abs() < 1e-10);
    }
}

#[test]
fn bad_thread_count_is_a_usage_error() {
    let o = Command::new(env!("CARGO_BIN_EXE_umbilic")).args(["fields", "list"]).env("UMBILIC_THREADS", "zero").output().unwrap();
    assert_eq!(o.status.code(), Some(1));
}
