//! End-to-end tests against the compiled binary: stdout shapes and the
//! exit-code contract (0 ok, 2 config, 3 i/o, 4 numeric).

use std::path::Path;
use std::process::{Command, Output};

fn splitq(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_splitq"))
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("binary runs")
}

fn write(path: &Path, text: &str) {
    std::fs::write(path, text).unwrap();
}

const TRAIN_CONFIG: &str = r#"{
  "schema_version": 1,
  "environment": {"family": "chain", "n": 5},
  "profiles": ["standard", "PD"],
  "learning": {"alpha": 0.5, "gamma": 0.9, "epsilon": 1.0, "epsilon_end": 0.0,
               "episodes": 30, "max_steps": 40, "seed": 7},
  "repetitions": 2
}"#;

#[test]
fn list_profiles_prints_the_eight_rows() {
    let dir = tempfile::tempdir().unwrap();
    let out = splitq(&["list-profiles"], dir.path());
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<&str> = stdout.lines().skip(1).collect();
    assert_eq!(rows.len(), 8);
    let pd = rows.iter().find(|r| r.starts_with("PD")).unwrap();
    assert!(pd.contains("0.5 ± 0.1") && pd.contains("100 ± 10"), "{pd}");
    let standard = rows.iter().find(|r| r.starts_with("standard")).unwrap();
    assert!(!standard.contains('±'));
}

#[test]
fn train_writes_outputs_and_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    write(&dir.path().join("cfg.json"), TRAIN_CONFIG);
    let out = splitq(
        &["train", "--config", "cfg.json", "--out", "results", "--deterministic-profiles"],
        dir.path(),
    );
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    for file in [
        "results/standard_rep0.csv",
        "results/standard_rep1.csv",
        "results/PD_rep0.csv",
        "results/PD_rep1.run.json",
        "results/aggregate.csv",
        "results/learning_curves.svg",
    ] {
        assert!(dir.path().join(file).exists(), "{file} missing");
    }
}

#[test]
fn unknown_profile_exits_with_config_code() {
    let dir = tempfile::tempdir().unwrap();
    write(
        &dir.path().join("cfg.json"),
        &TRAIN_CONFIG.replace("\"PD\"", "\"nonesuch\""),
    );
    let out = splitq(&["train", "--config", "cfg.json"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("nonesuch"));
}

#[test]
fn invalid_geometry_exits_with_config_code() {
    let dir = tempfile::tempdir().unwrap();
    write(
        &dir.path().join("cfg.json"),
        &TRAIN_CONFIG.replace("\"n\": 5", "\"n\": 1"),
    );
    let out = splitq(&["train", "--config", "cfg.json"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_config_exits_with_io_code() {
    let dir = tempfile::tempdir().unwrap();
    let out = splitq(&["train", "--config", "absent.json"], dir.path());
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn malformed_trajectory_file_exits_with_io_code_and_line() {
    let dir = tempfile::tempdir().unwrap();
    let config = r#"{
      "schema_version": 1,
      "environment": {"family": "risky_path", "safe_len": 6, "risky_len": 2,
                      "penalty_prob": 0.2, "penalty": 1.0, "goal_reward": 10.0},
      "profiles": ["standard"],
      "learning": {"alpha": 0.1, "gamma": 0.9, "epsilon": 1.0, "epsilon_end": 0.0,
                   "episodes": 50, "max_steps": 60, "seed": 3},
      "recover": {"candidates": ["standard", "PD"], "seeds_per_candidate": 1}
    }"#;
    write(&dir.path().join("cfg.json"), config);
    write(
        &dir.path().join("bad.csv"),
        "episode_id,t,state,action,reward\n0,0,zero,0,0\n",
    );
    let out = splitq(&["recover", "bad.csv", "--config", "cfg.json"], dir.path());
    assert_eq!(out.status.code(), Some(3));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("line 2"), "stderr: {stderr}");
}

#[test]
fn seed_flag_overrides_config() {
    let dir = tempfile::tempdir().unwrap();
    write(&dir.path().join("cfg.json"), TRAIN_CONFIG);
    let run = |out_dir: &str, seed: &str| {
        let out = splitq(
            &["train", "--config", "cfg.json", "--out", out_dir, "--seed", seed],
            dir.path(),
        );
        assert!(out.status.success());
        std::fs::read_to_string(dir.path().join(out_dir).join("standard_rep0.csv")).unwrap()
    };
    let a = run("a", "5");
    let b = run("b", "5");
    let c = run("c", "6");
    assert_eq!(a, b, "same seed flag, same bytes");
    assert_ne!(a, c, "different seed flag changes the run");
}
