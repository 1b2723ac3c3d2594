use std::fs;
use std::process::Command;

fn geonflow() -> Command {
    Command::new(env!("CARGO_BIN_EXE_geonflow"))
}

#[test]
fn evolve_writes_series_with_termination() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run.csv");
    let status = geonflow()
        .args(["evolve", "--family", "alpha", "--alpha", "3", "--n", "3", "--rc", "10", "--N", "401"])
        .args(["--t-max", "0.05", "--snapshots", "0,0.05", "--out"])
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let text = fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("# columns: t,s_throat,"));
    assert_eq!(lines.last().unwrap(), &"# termination: reached-horizon");
    assert_eq!(lines[1].split(',').count(), 8);
    assert!(lines[1].split(',').all(|x| x.contains('e')));
    assert!(dir.path().join("run.snap0.csv").exists());
    assert!(dir.path().join("run.snap1.csv").exists());
}

#[test]
fn identical_configs_give_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(&cfg, "family = \"tangherlini\"\nn = 4\nnodes = 201\nt_max = 0.05\n").unwrap();
    let mut outputs = Vec::new();
    for name in ["a.csv", "b.csv"] {
        let out = dir.path().join(name);
        let status = geonflow().args(["evolve", "--config"]).arg(&cfg).arg("--out").arg(&out).status().unwrap();
        assert_eq!(status.code(), Some(0));
        outputs.push(fs::read(&out).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn flags_override_config_and_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    let saved = dir.path().join("saved.toml");
    fs::write(&cfg, "alpha = 2.0\nnodes = 201\nt_max = 0.01\n").unwrap();
    let status = geonflow()
        .args(["evolve", "--config"])
        .arg(&cfg)
        .args(["--alpha", "2.5", "--save-config"])
        .arg(&saved)
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(0));
    let merged: geonflow::config::RunConfig = toml::from_str(&fs::read_to_string(&saved).unwrap()).unwrap();
    assert_eq!(merged.alpha, 2.5);
    assert_eq!(merged.nodes, 201);
    assert_eq!(toml::from_str::<geonflow::config::RunConfig>(&merged.to_toml()).unwrap(), merged);
}

#[test]
fn config_errors_exit_one() {
    let status = geonflow().args(["evolve", "--config", "/nonexistent/run.toml"]).output().unwrap();
    assert_eq!(status.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&status.stderr).contains("cannot read"));
    let status = geonflow().args(["evolve", "--alpha", "-1"]).output().unwrap();
    assert_eq!(status.status.code(), Some(1));
}

#[test]
fn stepper_failure_exits_two() {
    let status = geonflow()
        .args(["evolve", "--N", "201", "--t-max", "1", "--max-steps", "2"])
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(2));
    let text = String::from_utf8_lossy(&status.stdout);
    assert!(text.lines().last().unwrap().starts_with("# termination: stepper-failure"));
}

#[test]
fn barrier_table() {
    let out = geonflow().args(["barrier", "--a2", "0", "--delta", "1"]).output().unwrap();
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.starts_with("# t*: 1.00000000000e0\n"));
    let out = geonflow().args(["barrier", "--a2", "3.4", "--delta", "1"]).output().unwrap();
    assert!(String::from_utf8_lossy(&out.stdout).contains("no collapse bound"));
    let out = geonflow().args(["barrier", "--a2", "1.3333333333", "--delta", "1"]).output().unwrap();
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("# t*: 1.4216"));
}

#[test]
fn sweep_writes_summary() {
    let dir = tempfile::tempdir().unwrap();
    let status = geonflow()
        .args(["sweep", "--alphas", "1,3", "--N", "201", "--t-max", "0.02", "--out-dir"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(0));
    let summary = fs::read_to_string(dir.path().join("summary.csv")).unwrap();
    let lines: Vec<&str> = summary.lines().collect();
    assert_eq!(lines[0], "# columns: alpha,termination,t_end,steps");
    assert!(lines[1].starts_with("1.00000000000e0,reached-horizon,"));
    assert!(lines[2].starts_with("3.00000000000e0,reached-horizon,"));
    assert!(dir.path().join("alpha_1.csv").exists());
    assert!(dir.path().join("alpha_3.csv").exists());
}

#[test]
fn validate_runs_selected_criteria() {
    let out = geonflow().args(["validate", "--only", "10"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.starts_with("criterion 10 PASS"));
}
