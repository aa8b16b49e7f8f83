use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_schreier-lab"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn path_graph(n: usize) -> String {
    let edges: Vec<Value> = (0..n - 1)
        .map(|i| serde_json::json!({ "u": i, "v": i + 1, "labels": ["e"] }))
        .collect();
    serde_json::json!({ "vertices": (0..n).collect::<Vec<_>>(), "edges": edges, "loops": [], "degree_bound": 2 }).to_string()
}

#[test]
fn exact_partition_of_nine_path() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("g.json"), path_graph(9)).unwrap();
    let out = run(dir.path(), &["partition", "--in", "g.json", "--K", "3", "--mode", "exact", "--out", "c.json"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let cert: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("c.json")).unwrap()).unwrap();
    assert_eq!(cert["removed"].as_array().unwrap().len(), 2);
    assert_eq!(cert["epsilon"], "2/9");
    assert_eq!(cert["mode"], "edge");

    let verify = run(dir.path(), &["verify", "--kind", "certificate", "--in", "c.json", "--graph", "g.json"]);
    assert!(verify.status.success(), "{}", String::from_utf8_lossy(&verify.stderr));
    let again = run(dir.path(), &["verify", "--kind", "graph", "--in", "g.json"]);
    assert!(!again.status.success(), "hand-written JSON is not in canonical form");
}

#[test]
fn precondition_violation_exits_2_with_json() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("g.json"), "{\"vertices\": [0, 1], \"edges\": [{\"u\": 0, \"v\": 5, \"labels\": [\"e\"]}], \"loops\": [], \"degree_bound\": 1}").unwrap();
    let out = run(dir.path(), &["partition", "--in", "g.json", "--K", "1"]);
    assert_eq!(out.status.code(), Some(2));
    let err: Value = serde_json::from_str(String::from_utf8_lossy(&out.stderr).trim()).unwrap();
    assert_eq!(err["error"], "graph");

    let missing = run(dir.path(), &["census", "--in", "nope.json", "--radius", "1"]);
    assert_eq!(missing.status.code(), Some(1));
    let unknown = run(dir.path(), &["census", "--in", "g.json", "--radius", "1", "--bogus"]);
    assert_eq!(unknown.status.code(), Some(2));
}

#[test]
fn tower_round_trip_and_witness() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["tower", "--k", "1", "--out", "t"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).contains("tree radius 1"));
    let manifest: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("t/manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["levels"].as_array().unwrap().len(), 5);

    let verify = run(dir.path(), &["verify", "--kind", "tower", "--in", "t"]);
    assert!(verify.status.success(), "{}", String::from_utf8_lossy(&verify.stderr));

    let w = run(dir.path(), &["witness", "--tower", "t", "--word", "A", "--level", "1", "--vertex", "1"]);
    assert!(w.status.success());
    let text = String::from_utf8_lossy(&w.stdout);
    let json: Value = serde_json::from_str(&text[text.find('{').unwrap()..]).unwrap();
    assert_ne!(json["witness"]["vertex"], json["witness"]["image"]);

    let trivial = run(dir.path(), &["witness", "--tower", "t", "--word", "A A", "--level", "1", "--vertex", "0"]);
    assert_eq!(trivial.status.code(), Some(2));
}

#[test]
fn budget_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_schreier-lab"))
        .current_dir(dir.path())
        .env("SCHREIER_LAB_BUDGET", "16")
        .args(["tower", "--k", "1", "--out", "t"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("budget"));
}

#[test]
fn outputs_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["a.json", "b.json"] {
        let out = run(dir.path(), &["schreier", "--action", "f2z", "--window", "20", "--out", name]);
        assert!(out.status.success());
    }
    let a = fs::read(dir.path().join("a.json")).unwrap();
    assert_eq!(a, fs::read(dir.path().join("b.json")).unwrap());
    assert!(run(dir.path(), &["verify", "--kind", "graph", "--in", "a.json"]).status.success());

    let census = run(dir.path(), &["census", "--in", "a.json", "--radius", "2", "--out", "c.json"]);
    assert!(census.status.success());
    let verify = run(dir.path(), &["verify", "--kind", "census", "--in", "c.json", "--graph", "a.json"]);
    assert!(verify.status.success(), "{}", String::from_utf8_lossy(&verify.stderr));
}

#[test]
fn f2z_displacement_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        dir.path(),
        &["f2z", "--config", "default", "--check-displacement", "8", "--window", "4096", "--out", "f.json"],
    );
    assert!(out.status.success());
    let report: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("f.json")).unwrap()).unwrap();
    for profile in report["profiles"].as_array().unwrap() {
        let rows = profile["rows"].as_array().unwrap();
        assert_eq!(rows.len(), 8);
        assert!(rows.iter().all(|r| r["holds"] == true));
        assert!(rows[0]["fraction"].as_str().unwrap().contains('/'));
    }
}

#[test]
fn folner_squares_on_grid() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["folner", "--grid", "12", "--target", "2/5", "--max-size", "400"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8_lossy(&out.stdout);
    let json: Value = serde_json::from_str(&text[text.find('{').unwrap()..]).unwrap();
    assert_eq!(json["size"], 100);
    assert_eq!(json["constant"], "2/5");
}
