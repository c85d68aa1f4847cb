use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qudit-maps"))
        .args(args)
        .env_remove("QUDIT_MAPS_SEED")
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> (Value, i32) {
    let out = run(args);
    let v = serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)));
    (v, out.status.code().unwrap())
}

fn temp_path(name: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("qudit-maps-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn classify_e4_is_entanglement_breaking() {
    let (v, code) = json(&["classify", "--d", "3", "--alpha", "1", "--beta", "-0.3333333333"]);
    assert_eq!(code, 0);
    assert_eq!(v["eb"], true);
    assert_eq!(v["oracle"]["eb"], true);
}

#[test]
fn classify_reduction_map() {
    let (v, code) = json(&["classify", "--d", "3", "--alpha", "1.5", "--beta", "0"]);
    assert_eq!(code, 0);
    assert_eq!(v["positive"], true);
    assert_eq!(v["cp"], false);
}

#[test]
fn classify_negative_alpha() {
    let (v, _) = json(&["classify", "--d", "3", "--alpha", "-0.1", "--beta", "0"]);
    assert_eq!(v["positive"], false);
}

#[test]
fn bad_arguments_exit_two() {
    assert_eq!(run(&["classify", "--d", "3", "--alpha", "abc", "--beta", "0"]).status.code(), Some(2));
    assert_eq!(run(&["classify", "--d", "1", "--alpha", "0", "--beta", "0"]).status.code(), Some(2));
    assert_eq!(run(&["trajectory", "--d", "3", "--schedule", "bogus"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn region_and_area() {
    let (v, code) = json(&["region", "--d", "3", "--which", "eb"]);
    assert_eq!(code, 0);
    assert_eq!(v["vertices"].as_array().unwrap().len(), 4);

    let (v, _) = json(&["area", "--d", "3"]);
    assert_eq!(v["P"].as_f64().unwrap(), 1.875);
    assert_eq!(v["CP"].as_f64().unwrap(), 1.125);
    assert!((v["EB"].as_f64().unwrap() - 0.5833333333).abs() < 1e-10);

    let out = run(&["region", "--d", "2", "--which", "eb", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let csv = String::from_utf8(out.stdout).unwrap();
    assert_eq!(csv.lines().next(), Some("alpha,beta"));
    assert_eq!(csv.lines().count(), 5);
}

#[test]
fn trajectory_rides_cp_boundary() {
    let out = run(&["trajectory", "--d", "3", "--schedule", "enm", "--t-max", "5", "--steps", "100"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let col = header.iter().position(|h| *h == "min_choi_eig").unwrap();
    let rows: Vec<f64> = lines.map(|l| l.split(',').nth(col).unwrap().parse().unwrap()).collect();
    assert_eq!(rows.len(), 101);
    assert!(rows.iter().all(|e| (-1e-10..=1e-8).contains(e)));
}

#[test]
fn crossings_are_ordered() {
    let (v, code) = json(&["crossings", "--d", "3", "--kappa", "1", "--nu", "-1.5"]);
    assert_eq!(code, 0);
    let t = |k: &str| v[k].as_f64().unwrap();
    assert!(t("t_P") < t("t_CP") && t("t_CP") < t("t_EB"));
}

#[test]
fn qubit_rate_bound_is_saturated() {
    let (v, code) = json(&["spectrum", "--d", "2", "--kappa", "1", "--nu", "0", "--class", "kpos"]);
    assert_eq!(code, 0);
    assert_eq!(v["bound_saturated"], true);
    let (v, _) = json(&["spectrum", "--d", "3", "--kappa", "1", "--nu", "0", "--class", "kpos"]);
    assert_eq!(v["bound_saturated"], false);
}

#[test]
fn output_is_deterministic() {
    let args = ["classify", "--d", "4", "--alpha", "0.7", "--beta", "0.2", "--seed", "9", "--budget", "500"];
    assert_eq!(run(&args).stdout, run(&args).stdout);
    let args = ["trajectory", "--d", "3", "--schedule", "weyl", "--t-max", "2", "--steps", "20"];
    assert_eq!(run(&args).stdout, run(&args).stdout);
}

#[test]
fn floats_have_twelve_significant_digits() {
    let out = run(&["area", "--d", "3"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("0.583333333333"), "{text}");
    assert!(!text.contains("0.5833333333333"));
}

#[test]
fn seed_precedence() {
    let cfg = temp_path("config.json");
    std::fs::write(&cfg, r#"{"seed": 5, "sample_budget": 300}"#).unwrap();
    let base = ["spectrum", "--d", "3", "--nu", "-0.2"];
    let seed_of = |extra: &[&str], env: Option<&str>| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_qudit-maps"));
        cmd.args(base).args(extra).env_remove("QUDIT_MAPS_SEED");
        if let Some(s) = env {
            cmd.env("QUDIT_MAPS_SEED", s);
        }
        let v: Value = serde_json::from_slice(&cmd.output().unwrap().stdout).unwrap();
        v["tests"]["dissipativity"]["seed"].as_u64().unwrap()
    };
    let c = cfg.to_str().unwrap();
    assert_eq!(seed_of(&[], None), 42);
    assert_eq!(seed_of(&["--config", c], None), 5);
    assert_eq!(seed_of(&["--config", c], Some("11")), 11);
    assert_eq!(seed_of(&["--config", c, "--seed", "13"], Some("11")), 13);
}

#[test]
fn apply_evolves_state_file() {
    let state = temp_path("state.json");
    std::fs::write(&state, r#"{"d": 2, "rho": [[1,0],[0,0],[0,0],[0,0]]}"#).unwrap();
    let (v, code) = json(&["apply", "--state", state.to_str().unwrap(), "--schedule", "enm", "--t", "30"]);
    assert_eq!(code, 0);
    let rho = v["rho"].as_array().unwrap();
    // E4 sends |0><0| to (|0><0| + 1 - |0><0|) / 2 = 1/2
    assert!((rho[0][0].as_f64().unwrap() - 0.5).abs() < 1e-10);
    assert!((rho[3][0].as_f64().unwrap() - 0.5).abs() < 1e-10);

    std::fs::write(&state, r#"{"d": 2, "rho": [[2,0],[0,0],[0,0],[0,0]]}"#).unwrap();
    assert_eq!(run(&["apply", "--state", state.to_str().unwrap(), "--t", "1"]).status.code(), Some(2));
}

#[test]
fn output_flag_writes_file() {
    let path = temp_path("area.json");
    let out = run(&["area", "--d", "4", "--output", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["d"], 4);
}

#[test]
fn verify_reports_one_line_per_check() {
    let out = run(&["verify", "--suite", "dynamics"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().filter(|l| !l.ends_with("failed")).all(|l| l.starts_with("PASS ")));

    // the published EB area disagrees with the polygon, so the region suite is red
    let out = run(&["verify", "--suite", "regions"]);
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().any(|l| l.starts_with("FAIL regions/area-EB")));
}
