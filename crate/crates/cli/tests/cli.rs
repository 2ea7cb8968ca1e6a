use std::fs;
use std::process::{Command, Output};

use renorm_core::experiments::ExperimentConfig;

fn renorm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_renorm"))
        .args(args)
        .output()
        .expect("spawn renorm")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

#[test]
fn csv_output_is_byte_identical_across_runs() {
    let args = ["beltrami", "--family", "blaschke", "--levels", "3..5", "--samples", "32", "--seed", "11"];
    let a = renorm(&args);
    let b = renorm(&args);
    assert_eq!(code(&a), 0, "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    assert!(text.starts_with("level,sup_mu_eta,sup_mu_xi,skipped_fraction"));
    assert_eq!(text.lines().count(), 4);
}

#[test]
fn seed_changes_sampled_output() {
    let base = ["beltrami", "--family", "blaschke", "--levels", "4..4", "--samples", "16"];
    let a = renorm(&[&base[..], &["--seed", "1"]].concat());
    let b = renorm(&[&base[..], &["--seed", "2"]].concat());
    assert_ne!(a.stdout, b.stdout);
}

#[test]
fn realbounds_csv_columns() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bounds.csv");
    let out = renorm(&["realbounds", "--levels", "4..6", "--emit", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let text = fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "level,max_ratio,min_ratio,max_atom,distortion_long,distortion_short"
    );
    assert_eq!(lines.count(), 3);
}

#[test]
fn json_echo_reproduces_the_config() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("orbit.json");
    let out = renorm(&["orbit", "--levels", "2..4", "--grid", "32", "--seed", "5", "--out", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(json["records"].as_array().unwrap().len(), 3);
    let cfg: ExperimentConfig = serde_json::from_value(json["metadata"]["config"].clone()).unwrap();
    assert_eq!(cfg.levels, (2, 4));
    assert_eq!(cfg.grid, 32);
    assert_eq!(cfg.seed, 5);
    assert_eq!(ExperimentConfig::from_kv(&cfg.to_kv()).unwrap(), cfg);
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "levels = 2..3\nfamily = blaschke\nrotation = silver\n").unwrap();
    let out = renorm(&["realbounds", "--config", cfg.to_str().unwrap(), "--levels", "4..4", "--format", "json"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(json["metadata"]["config"]["family"], "blaschke");
    assert_eq!(json["metadata"]["config"]["rotation"], "silver");
    assert_eq!(json["records"][0]["level"], 4);
}

#[test]
fn hexfloat_columns_follow_float_columns() {
    let out = renorm(&["qc-constant", "--domain", "rect:0,1,0,0.25", "--resolution", "64", "--hexfloat"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let header: Vec<&str> = text.lines().next().unwrap().split(',').collect();
    assert_eq!(&header[..4], &["domain", "resolution", "c_u", "c_u_hex"]);
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert!(row.iter().any(|f| f.starts_with("0x1.")));
}

#[test]
fn tune_prints_json_by_default() {
    let out = renorm(&["tune", "--family", "arnold", "--rotation", "golden", "--depth", "12"]);
    assert_eq!(code(&out), 0);
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let param = json["records"][0]["param"].as_f64().unwrap();
    assert!(param > 0.6 && param < 0.61);
}

#[test]
fn validation_errors_exit_with_two() {
    assert_eq!(code(&renorm(&["converge", "--levels", "5..4"])), 2);
    assert_eq!(code(&renorm(&["orbit", "--precision", "extended"])), 2);
    assert_eq!(code(&renorm(&["tune", "--rotation", "cf:1,2"])), 2);
    assert_eq!(code(&renorm(&["tune", "--family", "henon"])), 2);
    assert_eq!(code(&renorm(&["qc-constant", "--domain", "disk:0,0"])), 2);
    assert_eq!(code(&renorm(&["frobnicate"])), 2);
}

#[test]
fn unknown_config_key_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    fs::write(&cfg, "colour = blue\n").unwrap();
    assert_eq!(code(&renorm(&["tune", "--config", cfg.to_str().unwrap()])), 2);
}

#[test]
fn uncertified_depth_exits_with_three() {
    // A decimal keeps only the terms its ulp enclosure certifies.
    let out = renorm(&["tune", "--rotation", "0.618034", "--depth", "20"]);
    assert_eq!(code(&out), 3, "{}", String::from_utf8_lossy(&out.stderr));
    let out = renorm(&["tune", "--rotation", "0.618034", "--depth", "4"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn stalled_bisection_exits_with_four() {
    let out = renorm(&["tune", "--family", "blaschke", "--rotation", "cf:1,200,...", "--depth", "4"]);
    assert_eq!(code(&out), 4, "{}", String::from_utf8_lossy(&out.stderr));
}
