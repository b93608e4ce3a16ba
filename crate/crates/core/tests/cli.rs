//! End-to-end tests of the `framelab` binary.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use framelab::runner::{ExperimentReport, Status, NORMALIZED_REPORT_FILE, REPORT_FILE};
use framelab::splitting::{GRID_HEADER_LEN, GRID_MAGIC};
use serde_json::Value;
use tempfile::TempDir;

fn framelab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_framelab")).args(args).output().unwrap()
}

fn write_config(dir: &TempDir, json: &str) -> PathBuf {
    let p = dir.path().join("config.json");
    fs::write(&p, json).unwrap();
    p
}

fn run(config: &Path, out: &Path, extra: &[&str]) -> Output {
    let mut args = vec!["run", "--config", config.to_str().unwrap(), "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    framelab(&args)
}

#[test]
fn list_systems_catalog() {
    let o = framelab(&["list-systems", "--json"]);
    assert!(o.status.success());
    let catalog: Value = serde_json::from_slice(&o.stdout).unwrap();
    let entries = catalog.as_array().unwrap();
    let names: Vec<&str> = entries.iter().map(|e| e["name"].as_str().unwrap()).collect();
    for n in ["toral-affine", "heis", "sol", "suspension", "circle-extension"] {
        assert!(names.contains(&n), "{n} missing");
    }
    assert!(entries.iter().all(|e| !e["branch"].as_str().unwrap().is_empty()));
    let heis = entries.iter().find(|e| e["name"] == "heis").unwrap();
    let params: Vec<&str> = heis["parameters"].as_array().unwrap().iter().map(|p| p["name"].as_str().unwrap()).collect();
    assert_eq!(params, ["b", "k"]);
    assert_eq!(heis["parameters"][0]["kind"], "4 integers");

    let text = framelab(&["list-systems"]);
    assert!(text.status.success());
    assert!(String::from_utf8(text.stdout).unwrap().contains("branch: algebraic (heis3)"));
}

#[test]
fn run_verify_and_export_splitting() {
    let dir = TempDir::new().unwrap();
    let config = write_config(
        &dir,
        r#"{"system": {"name": "circle-extension"}, "analyses": ["splitting", "regularity"],
            "settings": {"grid": [64, 64, 8], "regularity_grid": [256, 256, 2]}}"#,
    );
    let out = dir.path().join("out");
    let o = run(&config, &out, &[]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(out.join(NORMALIZED_REPORT_FILE).exists());
    let report = ExperimentReport::load(&out.join(REPORT_FILE)).unwrap();
    assert!(report.passed);
    for art in &report.artifacts {
        assert_eq!(fs::metadata(out.join(&art.path)).unwrap().len(), art.bytes);
    }

    let bin = fs::read(out.join("splitting_field.bin")).unwrap();
    assert_eq!(&bin[..8], &GRID_MAGIC);
    let dims: Vec<u32> = (0..3).map(|k| u32::from_le_bytes(bin[8 + 4 * k..12 + 4 * k].try_into().unwrap())).collect();
    assert_eq!(dims, [64, 64, 8]);
    assert_eq!(bin.len(), GRID_HEADER_LEN + 64 * 64 * 8 * 8);

    let v = framelab(&["verify", "--report", out.to_str().unwrap()]);
    assert_eq!(v.status.code(), Some(0));
    assert!(String::from_utf8(v.stdout).unwrap().contains("verify: passed"));

    let csv_dir = dir.path().join("csv");
    let e = framelab(&["export", "--report", out.to_str().unwrap(), "--analysis", "splitting", "--out", csv_dir.to_str().unwrap()]);
    assert!(e.status.success());
    let csv = fs::read_to_string(csv_dir.join("splitting.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("x,y,theta,slope"));
    assert_eq!(csv.lines().count(), 1 + 64 * 64);

    let missing = framelab(&["export", "--report", out.to_str().unwrap(), "--analysis", "lyapunov", "--out", csv_dir.to_str().unwrap()]);
    assert_eq!(missing.status.code(), Some(3));
}

#[test]
fn verify_detects_tampering() {
    let dir = TempDir::new().unwrap();
    let config = write_config(
        &dir,
        r#"{"system": {"name": "circle-extension"}, "analyses": ["splitting"], "settings": {"grid": [32, 32, 4]}}"#,
    );
    let out = dir.path().join("out");
    assert!(run(&config, &out, &[]).status.success());
    let path = out.join("splitting_field.bin");
    let mut bytes = fs::read(&path).unwrap();
    let last = bytes.len() - 8;
    bytes[last..].copy_from_slice(&7.0f64.to_le_bytes());
    fs::write(&path, &bytes).unwrap();
    let v = framelab(&["verify", "--report", out.join(REPORT_FILE).to_str().unwrap()]);
    assert_eq!(v.status.code(), Some(2));
    assert!(String::from_utf8(v.stdout).unwrap().contains("FAIL invariance"));
}

#[test]
fn export_profile_and_lyapunov() {
    let dir = TempDir::new().unwrap();
    let config = write_config(
        &dir,
        r#"{"experiments": [
            {"system": {"name": "parabolic-twist", "k": 2, "eps": 0.1}, "analyses": ["rotation-profile"]},
            {"system": {"name": "cat-map"}, "analyses": ["lyapunov"], "settings": {"lyapunov_starts": 4}}
        ]}"#,
    );
    let out = dir.path().join("out");
    let o = run(&config, &out, &[]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let summary: Value = serde_json::from_slice(&fs::read(out.join("batch.json")).unwrap()).unwrap();
    assert_eq!(summary["passed"], true);
    assert_eq!(summary["experiments"][1]["dir"], "01-cat-map");

    let csv_dir = dir.path().join("csv");
    let profile_dir = out.join("00-parabolic-twist");
    let e = framelab(&["export", "--report", profile_dir.to_str().unwrap(), "--analysis", "rotation-profile", "--out", csv_dir.to_str().unwrap()]);
    assert!(e.status.success());
    let csv = fs::read_to_string(csv_dir.join("rotation-profile.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("z,alpha"));

    let lyap_dir = out.join("01-cat-map");
    let e = framelab(&["export", "--report", lyap_dir.to_str().unwrap(), "--analysis", "lyapunov", "--out", csv_dir.to_str().unwrap()]);
    assert!(e.status.success());
    let csv = fs::read_to_string(csv_dir.join("lyapunov.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("iteration,exponent_0,exponent_1"));
}

#[test]
fn exit_codes_and_gating() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("out");

    let unknown = write_config(&dir, r#"{"system": {"name": "klein-bottle"}, "analyses": ["autonomy"]}"#);
    assert_eq!(run(&unknown, &out, &[]).status.code(), Some(3));
    let empty = write_config(&dir, r#"{"system": {"name": "cat-map"}, "analyses": []}"#);
    assert_eq!(run(&empty, &out, &[]).status.code(), Some(3));
    let missing = dir.path().join("nope.json");
    assert_eq!(run(&missing, &out, &[]).status.code(), Some(3));

    let failing = write_config(&dir, r#"{"system": {"name": "perturbed-cat"}, "analyses": ["autonomy", "classify"]}"#);
    assert_eq!(run(&failing, &out, &[]).status.code(), Some(2));
    let report = ExperimentReport::load(&out.join(REPORT_FILE)).unwrap();
    assert_eq!(report.analyses[0].status, Status::Failed);
    assert_eq!(report.analyses[1].status, Status::Skipped);
    assert!(report.analyses[1].gate.as_deref().unwrap().contains("autonomy failed"));
}

#[test]
fn json_only_and_seed_override() {
    let dir = TempDir::new().unwrap();
    let config = write_config(&dir, r#"{"system": {"name": "heis", "b": [2, 1, 1, 1]}, "analyses": ["autonomy", "lyapunov"], "seed": 1}"#);
    let out = dir.path().join("out");
    assert!(run(&config, &out, &["--json-only", "--seed", "9"]).status.success());
    let mut files: Vec<String> = fs::read_dir(&out).unwrap().map(|e| e.unwrap().file_name().into_string().unwrap()).collect();
    files.sort();
    assert_eq!(files, [REPORT_FILE, NORMALIZED_REPORT_FILE]);
    let report = ExperimentReport::load(&out.join(REPORT_FILE)).unwrap();
    assert_eq!(report.config.seed, 9);
    assert!(report.artifacts.is_empty());
    assert!(report.timings_ms.is_some());
    let normalized: Value = serde_json::from_slice(&fs::read(out.join(NORMALIZED_REPORT_FILE)).unwrap()).unwrap();
    assert!(normalized.get("timings_ms").is_none());
}

#[test]
fn thread_cap_is_validated() {
    let o = Command::new(env!("CARGO_BIN_EXE_framelab"))
        .env("FRAMELAB_THREADS", "zero")
        .arg("list-systems")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(3));
    let o = Command::new(env!("CARGO_BIN_EXE_framelab"))
        .env("FRAMELAB_THREADS", "2")
        .arg("list-systems")
        .output()
        .unwrap();
    assert!(o.status.success());
}
