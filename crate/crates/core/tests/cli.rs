use std::path::Path;
use std::process::{Command, Output};

fn sixcyl(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sixcyl"))
        .args(args)
        .current_dir(cwd)
        .env_remove("SIXCYL_THREADS")
        .output()
        .expect("binary runs")
}

#[test]
fn scan_writes_the_curve_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = sixcyl(&["scan", "--from", "0.01", "--to", "1.0", "--steps", "100", "--out", "curve.csv"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let csv = std::fs::read_to_string(dir.path().join("curve.csv")).unwrap();
    let lines: Vec<&str> = csv.split_terminator('\n').collect();
    assert_eq!(lines.len(), 102);
    assert_eq!(lines[0], "x,phi,delta,kappa,d2_common,d2_AE_class,psi_residual");
    assert!(!csv.contains('\r'));
    for row in &lines[1..] {
        let psi: f64 = row.rsplit(',').next().unwrap().parse().unwrap();
        assert!(psi.abs() < 1e-12);
    }
    let xs: Vec<f64> = lines[1..].iter().map(|r| r.split(',').next().unwrap().parse().unwrap()).collect();
    assert!(xs.windows(2).all(|w| w[0] < w[1]));
    assert_eq!(*xs.last().unwrap(), 1.0);
}

#[test]
fn certify_record_point() {
    let dir = tempfile::tempdir().unwrap();
    let out = sixcyl(&["certify", "--x", "1/2", "--out", "cert.json"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(dir.path().join("cert.json")).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["verdict"], "CERTIFIED_SHARP_MAX");
    assert_eq!(v["rank"], 11);
    assert_eq!(v["e_dim"], 4);
    assert_eq!(v["lambda"].as_array().unwrap().len(), 12);
    assert_eq!(v["lambda"][6]["label"], "AF");
    let keys: Vec<usize> = [
        "\"verdict\"",
        "\"rank\"",
        "\"singular_values\"",
        "\"lambda\"",
        "\"e_dim\"",
        "\"restricted_form\"",
        "\"eigenvalues\"",
        "\"margins\"",
        "\"tool_version\"",
        "\"seed\"",
    ]
    .iter()
    .map(|k| text.find(k).unwrap())
    .collect();
    assert!(keys.windows(2).all(|w| w[0] < w[1]));
}

#[test]
fn off_record_point_is_a_negative_verdict() {
    let dir = tempfile::tempdir().unwrap();
    let out = sixcyl(&["certify", "--x", "2/5"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stdout).contains("FAILED_A"));
}

#[test]
fn toy_fails_condition_b() {
    let dir = tempfile::tempdir().unwrap();
    let out = sixcyl(&["toy"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["verdict"], "FAILED_B");
    assert_eq!(v["eigenvalues"][0].as_f64().unwrap(), 4.0);
}

#[test]
fn usage_and_io_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["certify", "--x", "0.5"][..],
        &["certify", "--x", "3/2"],
        &["frobnicate"],
        &["scan", "--steps", "many"],
        &["scan", "--steps", "0"],
        &["certify", "--out", ""],
        &["scan", "--out", "missing/dir/curve.csv"],
        &["perturb", "--t", "-1"],
    ] {
        let out = sixcyl(args, dir.path());
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
    let out = sixcyl(&["--help"], dir.path());
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    for (args, file) in [
        (&["certify", "--x", "1/2", "--seed", "9", "--out", "a.json"][..], "a.json"),
        (&["perturb", "--samples", "2000", "--seed", "9", "--out", "p.json"], "p.json"),
        (&["scan", "--steps", "20", "--out", "s.csv"], "s.csv"),
        (&["galois", "--x", "1/3", "--out", "g.json"], "g.json"),
    ] {
        assert_eq!(sixcyl(args, dir.path()).status.code(), Some(0), "{args:?}");
        let first = std::fs::read(dir.path().join(file)).unwrap();
        let mut threaded = Command::new(env!("CARGO_BIN_EXE_sixcyl"));
        threaded.args(args).current_dir(dir.path()).env("SIXCYL_THREADS", "1");
        assert_eq!(threaded.output().unwrap().status.code(), Some(0));
        assert_eq!(first, std::fs::read(dir.path().join(file)).unwrap(), "{args:?}");
    }
}

#[test]
fn galois_reports_fields() {
    let dir = tempfile::tempdir().unwrap();
    for (x, field) in [("1/2", "Q[sqrt(5)]"), ("1/3", "Q[sqrt(2)]"), ("1/5", "Q")] {
        let out = sixcyl(&["galois", "--x", x], dir.path());
        assert_eq!(out.status.code(), Some(0));
        let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
        assert_eq!(v["field"], field, "x = {x}");
        assert_eq!(v["symmetry"]["group_order"], 12);
    }
}

#[test]
fn bad_thread_override_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_sixcyl"))
        .args(["toy"])
        .current_dir(dir.path())
        .env("SIXCYL_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}
