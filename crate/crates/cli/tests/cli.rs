use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn quadtrot(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_quadtrot")).args(args).output().expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn run_then_metrics_round_trip() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "stand.ini", "gait.mode = stand\nsim.duration = 1\n");
    let csv = dir.path().join("out.csv");
    let out = quadtrot(&["run", "--config", s(&cfg), "--out", s(&csv), "--json"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let ran: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(ran["duty_factor"], 1.0);

    let out = quadtrot(&["metrics", s(&csv), "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let again: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(ran, again);

    let out = quadtrot(&["metrics", s(&csv)]);
    assert!(String::from_utf8_lossy(&out.stdout).contains("duty factor"));
}

#[test]
fn plan_writes_every_leg() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "plan.ini", "sim.dt = 0.005\n");
    let csv = dir.path().join("plan.csv");
    let out = quadtrot(&["plan", "--config", s(&cfg), "--out", s(&csv)]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(&csv).unwrap();
    assert!(text.lines().any(|l| l.starts_with("# z_knots:")));
    for leg in ["lf", "rf", "lh", "rh"] {
        assert!(text.lines().any(|l| l.split(',').nth(1) == Some(leg)), "{leg}");
    }
}

#[test]
fn validation_errors_exit_2() {
    let dir = TempDir::new().unwrap();
    let csv = dir.path().join("x.csv");
    for (name, text) in [("key.ini", "gait.nope = 1\n"), ("value.ini", "gait.f = -2\n"), ("syntax.ini", "gait.f 3\n")] {
        let cfg = write(dir.path(), name, text);
        let out = quadtrot(&["run", "--config", s(&cfg), "--out", s(&csv)]);
        assert_eq!(out.status.code(), Some(2), "{name}: {}", String::from_utf8_lossy(&out.stderr));
        let out = quadtrot(&["plan", "--config", s(&cfg), "--out", s(&csv)]);
        assert_eq!(out.status.code(), Some(2), "{name}");
    }
}

#[test]
fn divergence_exits_3_and_keeps_partial_csv() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        dir.path(),
        "boom.ini",
        "sim.duration = 1\ndisturbance.impulse = 1e6\ndisturbance.start = 0.2\ndisturbance.duration = 0.01\n",
    );
    let csv = dir.path().join("boom.csv");
    let out = quadtrot(&["run", "--config", s(&cfg), "--out", s(&csv)]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = fs::read_to_string(&csv).unwrap().lines().filter(|l| !l.starts_with('#')).count();
    assert!(rows > 100, "{rows}");
}

#[test]
fn missing_files_exit_1() {
    let out = quadtrot(&["metrics", "/nonexistent/telemetry.csv"]);
    assert_eq!(out.status.code(), Some(1));
}
