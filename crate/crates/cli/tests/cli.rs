use std::path::Path;
use std::process::{Command, Output};

use decoynet::session::read_csv;
use decoynet::stats::Analysis;

fn decoynet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_decoynet"))
        .args(args)
        .env_remove("DECOYNET_OUT_DIR")
        .output()
        .unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn simulate_is_byte_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    assert!(decoynet(&["simulate", "--seed", "5", "--out", p(&a)]).status.success());
    assert!(decoynet(&["simulate", "--seed", "5", "--out", p(&b)]).status.success());
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let stdout = decoynet(&["simulate", "--seed", "5"]).stdout;
    assert_eq!(stdout, std::fs::read(&a).unwrap());
    let c = dir.path().join("c.csv");
    decoynet(&["simulate", "--seed", "6", "--out", p(&c)]);
    assert_ne!(std::fs::read(&a).unwrap(), std::fs::read(&c).unwrap());
    // 15 groups, 6 seats, 20 rounds.
    assert_eq!(read_csv(std::fs::File::open(&a).unwrap()).unwrap().len(), 1800);
}

#[test]
fn simulate_then_analyze_is_clean() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(
        &cfg,
        "session_type = \"ind_then_net_decoy\"\ngroup_count = 4\nreplications = 3\n\n[agent]\nkind = \"eu\"\nutility = \"crra:0.5\"\ntemperature = 4.0\n",
    )
    .unwrap();
    for format in ["csv", "json"] {
        let log = dir.path().join(format!("log.{format}"));
        let out = decoynet(&["simulate", "--config", p(&cfg), "--format", format, "--out", p(&log)]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        let report = dir.path().join("analysis.json");
        let out = decoynet(&["analyze", p(&log), "--out", p(&report)]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        assert!(out.stderr.is_empty(), "{}", String::from_utf8_lossy(&out.stderr));
        let a: Analysis = serde_json::from_slice(&std::fs::read(&report).unwrap()).unwrap();
        assert!(a.warnings.is_empty());
        assert_eq!(a.records, 3 * 4 * 6 * 20);
    }
}

#[test]
fn out_dir_environment_variable() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_decoynet"))
        .args(["simulate", "--seed", "1"])
        .env("DECOYNET_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    assert!(dir.path().join("sim.csv").exists());
}

#[test]
fn tables_writes_every_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = decoynet(&["tables", "--out", p(dir.path())]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for name in ["1", "2", "3", "4", "5", "6", "7", "8", "A1", "A2"] {
        let text = std::fs::read_to_string(dir.path().join(format!("table{name}.csv"))).unwrap();
        assert!(text.lines().count() > 1, "table {name}");
    }
    assert!(dir.path().join("report.txt").exists());
}

#[test]
fn solve_reports_json() {
    let out = decoynet(&["solve", "--treatment", "dec-net", "--utility", "crra:0.5"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["equilibria"], serde_json::json!(["NNNNNN"]));
    assert_eq!(v["payoffs"].as_array().unwrap().len(), 729);
    let out = decoynet(&["solve", "--treatment", "bas-net", "--exact"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["social_optimum"]["profile"], "NXNXNX");
}

#[test]
fn exit_codes() {
    assert_eq!(decoynet(&[]).status.code(), Some(1));
    assert_eq!(decoynet(&["solve", "--treatment", "bas-mid"]).status.code(), Some(1));
    assert_eq!(
        decoynet(&["solve", "--utility", "crra:0.5", "--exact"]).status.code(),
        Some(1)
    );

    let out = decoynet(&["simulate", "--config", "/nonexistent/run.toml"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("/nonexistent/run.toml"));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "rounds_per_part = \"ten\"\n").unwrap();
    let out = decoynet(&["simulate", "--config", p(&bad)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bad.toml"));
    std::fs::write(&bad, "colour = 1\n").unwrap();
    assert_eq!(decoynet(&["simulate", "--config", p(&bad)]).status.code(), Some(2));

    let garbage = dir.path().join("log.csv");
    std::fs::write(&garbage, "a,b\n1,2\n").unwrap();
    assert_eq!(decoynet(&["analyze", p(&garbage)]).status.code(), Some(2));
    assert_eq!(
        decoynet(&["analyze", p(&dir.path().join("missing.csv"))]).status.code(),
        Some(3)
    );

    let blocker = dir.path().join("file");
    std::fs::write(&blocker, "").unwrap();
    let out = decoynet(&["simulate", "--out", p(&blocker.join("x.csv"))]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn run_reports_help_as_success() {
    assert_eq!(decoynet_cli::run(["decoynet", "--version"]), 0);
    assert_eq!(decoynet_cli::run(["decoynet", "frobnicate"]), 1);
}
