use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn positivity(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_positivity"))
        .args(args)
        .env_remove("POSITIVITY_THREADS")
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

const COARSE: &str = "
[numerics]
quadrature_nodes = 8

[sampling]
grid = 4
fiber_theta = 3
fiber_rho = 2
conclusion_radii = 1
conclusion_angles = 3
";

fn scenario(dir: &Path, degrees: &str, omega: f64, theorems: &str, conclusions: bool) -> PathBuf {
    let rank = degrees.split(',').count();
    let text = format!(
        "name = \"t\"\n[bundle]\nrank = {rank}\ndegrees = [{degrees}]\n[metrics]\nomega = {omega}\n[run]\ntheorems = [{theorems}]\nconclusions = {conclusions}\n{COARSE}"
    );
    write(dir, "s.toml", &text)
}

fn strip_timings(json: &[u8]) -> serde_json::Value {
    let mut v: serde_json::Value = serde_json::from_slice(json).unwrap();
    v.as_object_mut().unwrap().remove("timings");
    v
}

#[test]
fn curvature_of_builtin() {
    let out = positivity(&["curvature", "--grid", "3"]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let c = &v["curvature"];
    assert!((c["min"].as_f64().unwrap() - 1.0).abs() < 1e-6);
    assert!((c["max"].as_f64().unwrap() - 9.0 / 7.0).abs() < 1e-6);
    assert_eq!(v["scenario"]["sampling"]["grid"], 3);
}

#[test]
fn same_config_gives_identical_json_apart_from_timings() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = scenario(dir.path(), "9, 8, 7", 7.0, "3", true);
    let cfg = cfg.to_str().unwrap();
    let a = positivity(&["verify", "--theorem", "3", "--config", cfg]);
    let b = positivity(&["verify", "--theorem", "3", "--config", cfg]);
    assert_eq!(
        a.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&a.stderr)
    );
    assert_eq!(strip_timings(&a.stdout), strip_timings(&b.stdout));
    let sa = serde_json::to_string(&strip_timings(&a.stdout)).unwrap();
    let sb = serde_json::to_string(&strip_timings(&b.stdout)).unwrap();
    assert_eq!(sa, sb);
}

#[test]
fn csv_has_one_row_per_selected_check() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = scenario(dir.path(), "9, 8, 7", 7.0, "1", false);
    let out = dir.path().join("r.csv");
    let o = positivity(&[
        "verify",
        "--theorem",
        "all",
        "--config",
        cfg.to_str().unwrap(),
        "--format",
        "csv",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(out).unwrap();
    assert_eq!(text.lines().count(), 1 + 4);
}

#[test]
fn failing_check_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = scenario(dir.path(), "1, -1", 1.0, "1", false);
    let o = positivity(&[
        "curvature",
        "--config",
        cfg.to_str().unwrap(),
        "--format",
        "csv",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stdout).contains(",fail,"));
}

#[test]
fn borderline_bound_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    // A = 2 = r everywhere for L²⊕L² against Θ
    let cfg = scenario(dir.path(), "2, 2", 1.0, "1", false);
    let o = positivity(&[
        "verify",
        "--theorem",
        "1",
        "--config",
        cfg.to_str().unwrap(),
        "--format",
        "csv",
    ]);
    assert_eq!(
        o.status.code(),
        Some(2),
        "{}",
        String::from_utf8_lossy(&o.stdout)
    );
    assert!(String::from_utf8_lossy(&o.stdout).contains(",inconclusive,"));
}

#[test]
fn configuration_errors_exit_three() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(
        dir.path(),
        "bad.toml",
        "[bundle]\nrank = 2\ndegree = [1, 1]\n[run]\ntheorems = [1]\n",
    );
    let o = positivity(&["curvature", "--config", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("did you mean `degrees`"));

    assert_eq!(
        positivity(&["curvature", "--config", "no-such-scenario"])
            .status
            .code(),
        Some(3)
    );
    assert_eq!(
        positivity(&["verify", "--theorem", "5"]).status.code(),
        Some(3)
    );
    assert_eq!(
        positivity(&["curvature", "--grid", "0"]).status.code(),
        Some(3)
    );

    let missing_dir = dir.path().join("nope").join("r.json");
    let o = positivity(&[
        "curvature",
        "--grid",
        "3",
        "--out",
        missing_dir.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("nope"));
}

#[test]
fn thread_count_is_validated() {
    let o = Command::new(env!("CARGO_BIN_EXE_positivity"))
        .args(["curvature", "--grid", "3"])
        .env("POSITIVITY_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(3));
    let o = Command::new(env!("CARGO_BIN_EXE_positivity"))
        .args(["curvature", "--grid", "3"])
        .env("POSITIVITY_THREADS", "2")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn tabulated_metric_reproduces_direct_sum_curvature() {
    let dir = tempfile::tempdir().unwrap();
    let h = positivity::HermitianMetric64::direct_sum(&[3, 2]).unwrap();
    let table = positivity::table::WeightTable::sample(&h, 81, 1.2).unwrap();
    write(dir.path(), "h.txt", &table);
    let cfg = write(
        dir.path(),
        "s.toml",
        "[bundle]\nrank = 2\ndegrees = [3, 2]\ntable = \"h.txt\"\n[run]\ntheorems = [1]\n",
    );
    let o = positivity(&[
        "curvature",
        "--grid",
        "4",
        "--config",
        cfg.to_str().unwrap(),
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let (min, max) = (
        v["curvature"]["min"].as_f64().unwrap(),
        v["curvature"]["max"].as_f64().unwrap(),
    );
    assert!(
        (min - 2.0).abs() < 1e-2 && (max - 3.0).abs() < 1e-2,
        "{min} {max}"
    );
}
