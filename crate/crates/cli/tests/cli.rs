use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use sha2::{Digest, Sha256};

fn hpl(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hpl"))
        .args(args)
        .arg("--out")
        .arg(out)
        .env_remove("HPL_OUT")
        .output()
        .unwrap()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn config_errors_exit_with_code_one() {
    let tmp = tempfile::tempdir().unwrap();
    let cases = [
        ("unknown.json", r#"{"schema_version": 1, "zero_cnt": 4}"#),
        ("version.json", r#"{"schema_version": 9}"#),
        ("radii.json", r#"{"schema_version": 1, "radii": []}"#),
        ("broken.json", "{"),
    ];
    for (name, body) in cases {
        let p = tmp.path().join(name);
        std::fs::write(&p, body).unwrap();
        let o = hpl(&["probe", "--config", p.to_str().unwrap()], &tmp.path().join("o"));
        assert_eq!(o.status.code(), Some(1), "{name}: {}", String::from_utf8_lossy(&o.stderr));
    }
    let o = hpl(&["rank", "--dims", "8,4"], &tmp.path().join("o"));
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn config_file_is_accepted_and_snapshotted() {
    let tmp = tempfile::tempdir().unwrap();
    let p = tmp.path().join("cfg.json");
    std::fs::write(&p, r#"{"schema_version": 1, "scenario": "prop1", "radii_levels": 6, "angular_samples": 64, "tolerances": {"s": 0.02}}"#).unwrap();
    let out = tmp.path().join("o");
    let o = hpl(&["probe", "--config", p.to_str().unwrap()], &out);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let report = read_json(&out.join("probe_report.json"));
    assert_eq!(report["tool"], "hpl");
    assert_eq!(report["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(report["config"]["scenario"], "prop1");
    assert_eq!(report["config"]["angular_samples"], 64);
    assert_eq!(report["config"]["tolerances"]["s"], 0.02);
    assert_eq!(report["config"]["tolerances"]["c"], 0.01);
}

#[test]
fn unwritable_output_exits_with_code_five() {
    let tmp = tempfile::tempdir().unwrap();
    let file = tmp.path().join("occupied");
    std::fs::write(&file, "x").unwrap();
    let o = hpl(&["selftest"], &file);
    assert_eq!(o.status.code(), Some(5));
}

#[test]
fn hypothesis_and_identity_failures_have_their_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let o = hpl(&["rank", "--degrees", "0,2"], tmp.path());
    assert_eq!(o.status.code(), Some(4));
    let o = hpl(&["verify", "--guard", "0"], tmp.path());
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn output_directory_comes_from_the_environment() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("from-env");
    let o = Command::new(env!("CARGO_BIN_EXE_hpl"))
        .arg("selftest")
        .env("HPL_OUT", &dir)
        .current_dir(tmp.path())
        .output()
        .unwrap();
    assert!(o.status.success());
    assert!(dir.join("selftest.json").is_file());
    assert!(!tmp.path().join("hpl-out").exists());
}

#[test]
fn export_manifest_hashes_match_files() {
    let tmp = tempfile::tempdir().unwrap();
    let o = hpl(&["export"], tmp.path());
    assert!(o.status.success());
    let manifest = read_json(&tmp.path().join("manifest.json"));
    let items = manifest["result"]["matrices"].as_array().unwrap();
    assert_eq!(items.len(), 2);
    for item in items {
        for f in item["files"].as_array().unwrap() {
            let bytes = std::fs::read(tmp.path().join(f["path"].as_str().unwrap())).unwrap();
            assert_eq!(hex::encode(Sha256::digest(&bytes)), f["sha256"].as_str().unwrap());
        }
    }
    let csv = std::fs::read_to_string(tmp.path().join("toeplitz_z.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("row,col,re,im"));
    assert_eq!(csv.lines().count(), 4);
    let bin = std::fs::read(tmp.path().join("toeplitz_z.bin")).unwrap();
    assert_eq!(bin.len(), 16 + 16 * 16);
}

#[test]
fn reports_use_full_precision() {
    let tmp = tempfile::tempdir().unwrap();
    assert!(hpl(&["probe", "--radii-levels", "4", "--angular-samples", "32"], tmp.path()).status.success());
    let text = std::fs::read_to_string(tmp.path().join("probe_report.json")).unwrap();
    assert!(text.contains("5.0000000000000000e-1"), "radius 1/2 should print with 17 digits");
    assert!(!tmp.path().read_dir().unwrap().any(|e| e.unwrap().file_name().to_string_lossy().contains(".tmp")));
}
