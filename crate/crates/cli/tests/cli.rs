use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use sha2::{Digest, Sha256};

fn confperc(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_confperc"))
        .arg("--out")
        .arg(out)
        .args(args)
        .output()
        .expect("binary runs")
}

fn manifest(dir: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap()
}

fn error_record(out: &Output) -> Value {
    let stderr = String::from_utf8_lossy(&out.stderr);
    let line = stderr.lines().rev().find(|l| l.starts_with('{')).expect("JSON error record");
    serde_json::from_str(line).unwrap()
}

fn csv_row(path: &Path) -> Vec<(String, String)> {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from);
    header.zip(lines.next().unwrap().split(',').map(String::from)).collect()
}

#[test]
fn modulus_of_the_refined_square_lattice() {
    let dir = tempfile::tempdir().unwrap();
    let out = confperc(dir.path(), &["modulus", "--graph", "T_s_refined"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let row = csv_row(&dir.path().join("modulus.csv"));
    let get = |k: &str| row.iter().find(|(h, _)| h == k).unwrap().1.parse::<f64>().unwrap();
    assert!((get("alpha_rw_im") - (6.0f64 / 7.0).sqrt()).abs() < 1e-9);
    assert!(get("alpha_rw_re").abs() < 1e-9);
    assert!((get("alpha_cp_im") - 1.0).abs() < 1e-9);
    assert!(get("alpha_cp_re").abs() < 1e-9);
    assert!(get("angle_residual") < 1e-10);
}

#[test]
fn manifest_hashes_match_the_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = confperc(dir.path(), &["pack", "--graph", "T_s_refined", "--svg"]);
    assert!(out.status.success());
    let m = manifest(dir.path());
    assert_eq!(m["command"], "pack");
    let outputs = m["outputs"].as_array().unwrap();
    assert_eq!(outputs.len(), 3);
    for o in outputs {
        let bytes = fs::read(dir.path().join(o["file"].as_str().unwrap())).unwrap();
        assert_eq!(o["sha256"].as_str().unwrap(), hex::encode(Sha256::digest(&bytes)));
    }
    let svg = fs::read_to_string(dir.path().join("packing.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.contains("<circle"));
}

#[test]
fn monte_carlo_outputs_are_reproducible_across_worker_counts() {
    let args = ["cross", "--delta", "0.1", "--trials", "3000", "--seed", "11"];
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    assert!(confperc(a.path(), &args).status.success());
    let mut more = vec!["--workers", "3"];
    more.extend(args);
    assert!(confperc(b.path(), &more).status.success());
    let read = |d: &Path| fs::read(d.join("crossing.csv")).unwrap();
    assert_eq!(read(a.path()), read(b.path()));
    assert_eq!(manifest(a.path())["config_hash"], manifest(b.path())["config_hash"]);
}

#[test]
fn flags_and_config_file_describe_the_same_run() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let flags = confperc(a.path(), &["mixed", "--width", "3", "--height", "2", "--q", "0.3", "--trials", "500", "--seed", "5"]);
    assert!(flags.status.success());
    let cfg = b.path().join("run.json");
    fs::write(
        &cfg,
        r#"{"command":"mixed","rectangle":{"width":3,"height":2},"q":[0.3],"sampling":{"trials":500,"seed":5}}"#,
    )
    .unwrap();
    let file = confperc(&b.path().join("out"), &["run", cfg.to_str().unwrap()]);
    assert!(file.status.success(), "{}", String::from_utf8_lossy(&file.stderr));
    assert_eq!(manifest(a.path())["config_hash"], manifest(&b.path().join("out"))["config_hash"]);
    assert_eq!(fs::read(a.path().join("mixed.csv")).unwrap(), fs::read(b.path().join("out/mixed.csv")).unwrap());
    let poly = fs::read_to_string(a.path().join("polynomial.txt")).unwrap();
    assert!(poly.contains('q'));
}

#[test]
fn missing_seed_is_a_configuration_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = confperc(dir.path(), &["cross", "--delta", "0.1"]);
    assert_eq!(out.status.code(), Some(2));
    let rec = error_record(&out);
    assert_eq!(rec["error"]["kind"], "invalid-config");
    assert!(rec["error"]["message"].as_str().unwrap().contains("seed"));
    assert!(!dir.path().join("manifest.json").exists());
}

#[test]
fn unknown_config_keys_and_bad_flags_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    fs::write(&cfg, r#"{"command":"modulus","graph":"T_h","colour":"red"}"#).unwrap();
    assert_eq!(confperc(dir.path(), &["run", cfg.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(confperc(dir.path(), &["modulus", "--bogus"]).status.code(), Some(2));
    assert_eq!(confperc(dir.path(), &["modulus", "--graph", "no-such-graph"]).status.code(), Some(2));
}

#[test]
fn non_convergence_exits_with_four_and_reports_the_residual() {
    let dir = tempfile::tempdir().unwrap();
    let out = confperc(dir.path(), &["pack", "--graph", "T_s_refined", "--max-iterations", "1"]);
    assert_eq!(out.status.code(), Some(4));
    let rec = error_record(&out);
    assert_eq!(rec["error"]["kind"], "non-convergence");
    assert!(rec["error"]["residual"].as_f64().unwrap() > 0.0);
}
