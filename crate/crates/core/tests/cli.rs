use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_grasp-eq")).args(args).output().unwrap()
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn without_timing(mut v: Value) -> Value {
    v.as_object_mut().unwrap().remove("timing_ms");
    v
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn check_downward_load_is_stable() {
    let f = fixture("three_contact.grasp");
    let doc = json(&run(&["check", path(&f), "--wrench", "0,-1,0"]));
    assert_eq!(doc["stable"], true);
    assert_eq!(doc["forces"][1]["local"], serde_json::json!([1.0, 0.0]));
    assert!(doc["residuals"]["verifier"].as_f64().unwrap() < 1e-9);
}

#[test]
fn check_and_oracle_agree_on_upward_load() {
    let f = fixture("three_contact.grasp");
    let check = json(&run(&["check", path(&f), "--wrench", "0,1,0"]));
    let oracle = json(&run(&["oracle", path(&f), "--wrench", "0,1,0"]));
    assert_eq!(check["stable"], false);
    assert_eq!(oracle["stable"], false);
}

#[test]
fn preloaded_twist_reports_forces() {
    let f = fixture("four_contact_preload.grasp");
    let doc = json(&run(&["check", path(&f), "--wrench", "0,0,3"]));
    assert_eq!(doc["stable"], true);
    let expected = [[1.25, 0.625], [0.75, 0.375], [1.25, 0.625], [0.75, 0.375]];
    for (i, e) in expected.iter().enumerate() {
        let local = &doc["forces"][i]["local"];
        assert!((local[0].as_f64().unwrap() - e[0]).abs() < 1e-6);
        assert!((local[1].as_f64().unwrap() - e[1]).abs() < 1e-6);
    }
}

#[test]
fn strict_mode_rejects_twist_without_preload() {
    let f = fixture("four_contact.grasp");
    let doc = json(&run(&["check", path(&f), "--wrench", "0,0,3", "--strict-eq4"]));
    assert_eq!(doc["stable"], false);
    assert_eq!(doc["mode"]["detachment"], false);
    assert_eq!(doc["mode"]["strict_eq4"], true);
}

#[test]
fn enumerate_counts_cells() {
    let f = fixture("three_contact.grasp");
    let doc = json(&run(&["enumerate", path(&f), "--no-detach"]));
    assert_eq!(doc["counts"]["states"], 26);
}

#[test]
fn region_writes_csv() {
    let f = fixture("three_contact_preload.grasp");
    let out = run(&["region", path(&f), "--directions", "4"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<_> = text.lines().collect();
    assert_eq!(lines[0], "dir_x,dir_y,max_force");
    assert_eq!(lines.len(), 5);
}

#[test]
fn gws_reports_slice() {
    let f = fixture("three_contact.grasp");
    let doc = json(&run(&["gws", path(&f)]));
    assert_eq!(doc["data"]["dimension"], 3);
    assert!(doc["data"]["slice"]["area"].as_f64().unwrap() > 0.0);
}

#[test]
fn linear_rejects_downward_load() {
    let f = fixture("three_contact.grasp");
    let doc = json(&run(&["linear", path(&f), "--wrench", "0,-1,0"]));
    assert_eq!(doc["stable"], false);
}

#[test]
fn generated_files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["gen", "--contacts", "4", "--seed", "7", "--preload"]);
    assert!(out.status.success());
    let file = dir.path().join("random.grasp");
    std::fs::write(&file, &out.stdout).unwrap();
    let doc = json(&run(&["check", path(&file), "--wrench", "0.1,-0.2,0.05"]));
    assert_eq!(doc["grasp"], "random_m4_s7");
    assert_eq!(out.stdout, run(&["gen", "--contacts", "4", "--seed", "7", "--preload"]).stdout);
}

#[test]
fn results_are_deterministic() {
    let f = fixture("four_contact.grasp");
    let args = ["check", path(&f), "--wrench", "0.3,-1.2,0.7"];
    let a = without_timing(json(&run(&args)));
    let b = without_timing(json(&run(&args)));
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
}

#[test]
fn malformed_file_exits_with_parse_code() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("bad.grasp");
    std::fs::write(&file, "name = \"bad\"\n[[contacts]]\nposition = [0.0]\n").unwrap();
    let out = run(&["check", path(&file), "--wrench", "0,0,0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn invalid_model_exits_with_validation_code() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("neg_mu.grasp");
    let text = "name = \"neg\"\n[[contacts]]\nposition = [0.0, 0.0]\nnormal = [0.0, -1.0]\nmu = -0.5\n";
    std::fs::write(&file, text).unwrap();
    let out = run(&["check", path(&file), "--wrench", "0,0,0"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn malformed_wrench_exits_with_parse_code() {
    let f = fixture("three_contact.grasp");
    let out = run(&["check", path(&f), "--wrench", "0,1"]);
    assert_eq!(out.status.code(), Some(2));
}
