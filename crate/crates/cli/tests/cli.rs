//! End-to-end tests of the `conifold` binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_conifold"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn dim_of_torus_cone_is_2m() {
    let config = fixture("hl_cone_dim.json");
    let out = run(&["dim", "--config", config.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let bundle: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert_eq!(bundle["dim"]["moduli_dim"], serde_json::json!(6));
    assert_eq!(bundle["dim"]["dim_o"], serde_json::json!(0));
    assert_eq!(bundle["dim"]["case"], serde_json::json!("CS/AC"));
    assert_eq!(bundle["schema_version"], serde_json::json!(1));
}

#[test]
fn exceptional_rate_exits_2_with_witness() {
    let config = fixture("sphere_exceptional.json");
    let out = run(&["dim", "--config", config.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("gamma = 1"), "stderr: {stderr}");
    assert!(stderr.contains("end 0"), "stderr: {stderr}");
}

#[test]
fn empty_compute_list_exits_1() {
    let config = fixture("empty_compute.json");
    let out = run(&["spectrum", "--config", config.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("/compute"));
}

#[test]
fn json_output_is_deterministic() {
    let config = fixture("hl_cone_dim.json");
    let args = ["weights", "--config", config.to_str().unwrap(), "--format", "json"];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout, "byte-identical output");
}

#[test]
fn weights_bundle_lists_gamma_rows() {
    let config = fixture("hl_cone_dim.json");
    let out = run(&[
        "weights",
        "--config",
        config.to_str().unwrap(),
        "--format",
        "json",
    ]);
    assert!(out.status.success());
    let bundle: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    let per_end = bundle["weights"]["per_end"].as_array().unwrap();
    assert_eq!(per_end.len(), 2);
    // gamma = 0, 1, 2 on the Harvey-Lawson torus over [0, 2]
    let first: Vec<(String, u64)> = per_end[0]
        .as_array()
        .unwrap()
        .iter()
        .map(|w| {
            (
                w["gamma"].as_str().unwrap().to_string(),
                w["mult"].as_u64().unwrap(),
            )
        })
        .collect();
    assert_eq!(
        first,
        vec![
            ("0".to_string(), 1),
            ("1".to_string(), 6),
            ("2".to_string(), 6)
        ]
    );
}

#[test]
fn csv_flattens_weight_rows() {
    let config = fixture("hl_cone_dim.json");
    let out = run(&[
        "weights",
        "--config",
        config.to_str().unwrap(),
        "--format",
        "csv",
    ]);
    assert!(out.status.success());
    let text = stdout_of(&out);
    assert!(text.starts_with("section,end,key,value,mult"));
    assert!(text.contains("weights,0,gamma,1,6"));
    assert!(text.contains("weights,1,gamma,2,6"));
}

#[test]
fn table_output_shows_stability_counts() {
    let config = fixture("hl_cone_dim.json");
    let out = run(&[
        "stability",
        "--config",
        config.to_str().unwrap(),
        "--format",
        "table",
    ]);
    assert!(out.status.success());
    let text = stdout_of(&out);
    assert!(text.contains("gamma=0: expected 1    observed 1"), "{text}");
    assert!(text.contains("stable = true"), "{text}");
}

#[test]
fn fredholm_cokernel_of_torus_cone() {
    let config = fixture("hl_cone_fredholm.json");
    let out = run(&[
        "fredholm",
        "--config",
        config.to_str().unwrap(),
        "--format",
        "json",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let bundle: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert_eq!(bundle["fredholm"]["ker_dim"], serde_json::json!(0));
    assert_eq!(bundle["fredholm"]["coker_dim"], serde_json::json!(13));
    assert_eq!(bundle["fredholm"]["index"], serde_json::json!(-13));
}

#[test]
fn topology_subcommand_assembles_complex() {
    let config = fixture("topology_only.json");
    let out = run(&["topology", "--config", config.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let bundle: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert_eq!(bundle["topology"]["b1_c"], serde_json::json!(1));
    assert_eq!(bundle["topology"]["b1_c_bullet"], serde_json::json!(0));
    assert_eq!(bundle["topology"]["s"], serde_json::json!(1));
}

#[test]
fn subcommand_not_in_compute_list_exits_1() {
    let config = fixture("hl_cone_dim.json");
    let out = run(&["topology", "--config", config.to_str().unwrap()]);
    // hl_cone_dim.json does not list "topology" in compute
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("report.json");
    let config = fixture("hl_cone_dim.json");
    let out = run(&[
        "dim",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&out_path).unwrap();
    let bundle: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(bundle["dim"]["moduli_dim"], serde_json::json!(6));
}

#[test]
fn match_tol_env_var_is_validated() {
    let config = fixture("hl_cone_fredholm.json");
    let out = Command::new(env!("CARGO_BIN_EXE_conifold"))
        .args(["fredholm", "--config", config.to_str().unwrap()])
        .env("CONIFOLD_MATCH_TOL", "not-a-float")
        .output()
        .expect("binary runs");
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("CONIFOLD_MATCH_TOL"));
}

#[test]
fn scan_flag_overrides_config_interval() {
    let config = fixture("hl_cone_dim.json");
    let out = run(&[
        "weights",
        "--config",
        config.to_str().unwrap(),
        "--format",
        "json",
        "--scan",
        "0:3",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let bundle: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    let first = bundle["weights"]["per_end"][0].as_array().unwrap();
    // scanning up to 3 picks up the weight from eigenvalue 8
    let symbols: Vec<&str> = first.iter().map(|w| w["gamma"].as_str().unwrap()).collect();
    assert_eq!(symbols, vec!["0", "1", "2", "(-1+1*sqrt(33))/2"]);
}

#[test]
fn mesh_link_resolves_relative_to_config() {
    let dir = tempfile::tempdir().unwrap();
    let mesh = conifold_core::spectra::mesh::meshgen::icosphere(2);
    std::fs::write(dir.path().join("sphere.off"), mesh.to_off_string()).unwrap();
    let config_text = r#"{
        "m": 3,
        "ends": [
            {"kind": "AC", "rate": "1/2",
             "link": {"mesh": {"path": "sphere.off", "count": 4, "cluster_tol": 0.05}}}
        ],
        "compute": ["spectrum"],
        "format": "json"
    }"#;
    let config_path = dir.path().join("job.json");
    std::fs::write(&config_path, config_text).unwrap();
    let out = run(&["spectrum", "--config", config_path.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let bundle: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    let entries = bundle["spectrum"][0]["entries"].as_array().unwrap();
    assert_eq!(entries[0][1], serde_json::json!(1));
    assert_eq!(entries[1][1], serde_json::json!(3));
    let e1 = entries[1][0].as_f64().unwrap();
    assert!((e1 - 2.0).abs() < 0.05, "e1 = {e1}");
}

#[test]
fn bundle_carries_every_requested_computation() {
    let config = fixture("hl_cone_dim.json");
    let out = run(&["dim", "--config", config.to_str().unwrap()]);
    assert!(out.status.success());
    let bundle: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    // the config requests spectrum, weights, stability and dim
    for section in ["spectrum", "weights", "stability", "dim"] {
        assert!(bundle.get(section).is_some(), "missing section {section}");
    }
    assert_eq!(bundle["stability"][0]["stable"], serde_json::json!(true));
    assert_eq!(bundle["spectrum"].as_array().unwrap().len(), 2);
}
