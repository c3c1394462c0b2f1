use std::process::Command;

use nonneg_cocycle::scenario::{Outcome, ScenarioSummary};

fn cocycle() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_cocycle"));
    c.env_remove("COCYCLE_OUT");
    c
}

#[test]
fn list_json_matches_schema() {
    let out = cocycle().args(["list", "--json"]).output().unwrap();
    assert!(out.status.success());
    let rows: Vec<ScenarioSummary> = serde_json::from_slice(&out.stdout).unwrap();
    assert!(rows.len() >= 8);
    let raw: Vec<serde_json::Value> = serde_json::from_slice(&out.stdout).unwrap();
    for r in &raw {
        let keys: Vec<&String> = r.as_object().unwrap().keys().collect();
        assert_eq!(keys, ["aliases", "analysis", "citation", "description", "expected", "name"]);
        assert!(!r["citation"].as_str().unwrap().is_empty());
    }
    assert!(rows.iter().any(|r| r.expected == Outcome::Oscillates));
}

#[test]
fn run_writes_artifacts_and_verdict_replays() {
    let dir = tempfile::tempdir().unwrap();
    let out = cocycle()
        .args(["run", "fibonacci-periodic", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let line = String::from_utf8(out.stdout).unwrap();
    assert!(line.contains("observed converges") && line.trim_end().ends_with("[OK]"), "{line}");
    let replay = cocycle().arg("verdict").arg(dir.path()).output().unwrap();
    assert_eq!(replay.status.code(), Some(0));
    assert_eq!(String::from_utf8(replay.stdout).unwrap(), line);
}

#[test]
fn out_dir_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let status = cocycle()
        .env("COCYCLE_OUT", dir.path())
        .args(["run", "zero-product"])
        .status()
        .unwrap();
    assert!(status.success());
    assert!(dir.path().join("trace.csv").exists());
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let code = |args: &[&str]| {
        cocycle()
            .args(args)
            .arg("--out")
            .arg(dir.path())
            .output()
            .unwrap()
            .status
            .code()
    };
    assert_eq!(code(&["run", "no-such-scenario"]), Some(2));
    assert_eq!(code(&["run", "nolimit", "--override", "plan.nosuch=1"]), Some(2));
    assert_eq!(code(&["run", "nolimit", "--override", "noequals"]), Some(2));
    // a computation error: the marker length is below the positivity word
    assert_eq!(code(&["run", "thue-morse-positive", "--override", "plan.k0=0"]), Some(3));
    assert_eq!(code(&["run", "zero-product", "--override", "expected=\"oscillates\""]), Some(4));
    let replay = cocycle().arg("verdict").arg(dir.path()).output().unwrap();
    assert_eq!(replay.status.code(), Some(4));
}

#[test]
fn direct_subcommands() {
    let dir = tempfile::tempdir().unwrap();
    let model = dir.path().join("model.toml");
    std::fs::write(
        &model,
        r#"
[source]
alphabet = 2
kind = "substitution"
rules = ["01", "10"]
seed_letter = 0

[cocycle]
kind = "first_coordinate"
matrices = [[[2.0, 1.0], [1.0, 1.0]], [[1.0, 3.0], [0.5, 1.0]]]
"#,
    )
    .unwrap();
    let trace = cocycle()
        .args(["trace", "--horizon", "4096", "--config"])
        .arg(&model)
        .output()
        .unwrap();
    assert!(trace.status.success(), "{}", String::from_utf8_lossy(&trace.stderr));
    let csv = String::from_utf8(trace.stdout).unwrap();
    assert!(csv.starts_with("n,log_norm,exponent,zero_flag\n"));
    assert!(csv.lines().last().unwrap().starts_with("4096,"));

    let returns = cocycle()
        .args(["returns", "--horizon", "100000", "--k0", "8", "--cutoff", "64", "--config"])
        .arg(&model)
        .output()
        .unwrap();
    assert!(returns.status.success(), "{}", String::from_utf8_lossy(&returns.stderr));
    let report: serde_json::Value = serde_json::from_slice(&returns.stdout).unwrap();
    assert_eq!(report["estimate"]["cutoff"], 64);

    let check = cocycle().args(["check", "--config"]).arg(&model).output().unwrap();
    assert!(String::from_utf8(check.stdout).unwrap().starts_with("witness"));

    let weights = dir.path().join("weights.toml");
    std::fs::write(&weights, nonneg_cocycle::multifractal::WeightedAverageSpec::besicovitch().to_toml().unwrap()).unwrap();
    let csv_path = dir.path().join("spectrum.csv");
    let spectrum = cocycle()
        .args(["spectrum", "--beta-min", "-2", "--beta-max", "2", "--points", "5", "--config"])
        .arg(&weights)
        .arg("--out")
        .arg(&csv_path)
        .status()
        .unwrap();
    assert!(spectrum.success());
    let curve = nonneg_cocycle::multifractal::SpectrumCurve::read_csv(std::fs::File::open(&csv_path).unwrap()).unwrap();
    assert_eq!(curve.points.len(), 5);
    assert!((curve.points[2].dim - 1.0).abs() < 1e-9);

    let missing = cocycle().args(["trace", "--horizon", "10", "--config", "/nonexistent.toml"]).status().unwrap();
    assert_eq!(missing.code(), Some(2));
}
