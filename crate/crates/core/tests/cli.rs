use std::process::{Command, Output};

use serde_json::Value;

fn grr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_grr")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn certify_q4_confirms() {
    let out = grr(&["certify", "--p", "2", "--f", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["verdict"]["status"], "GRR_CONFIRMED");
    assert_eq!(v["order"]["certificate"]["order"], 62400);
    assert_eq!(v["aut"]["queries"], 20);
}

#[test]
fn out_of_range_q_is_refused() {
    for (p, f) in [("3", "1"), ("2", "1")] {
        let out = grr(&["certify", "--p", p, "--f", f]);
        assert_eq!(out.status.code(), Some(2));
        assert!(String::from_utf8_lossy(&out.stderr).contains("outside the supported range"));
    }
    assert_eq!(grr(&["search-params", "--p", "6", "--f", "1"]).status.code(), Some(2));
}

#[test]
fn partial_stage_runs() {
    let out = grr(&["certify", "--p", "7", "--f", "1", "--stage", "order"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["verdict"]["status"], "INCOMPLETE");
    assert_eq!(v["order"]["certificate"]["order"], 5663616);
    assert!(v.get("aut").is_none());
    assert_eq!(v["stages"], serde_json::json!(["search", "construct", "order"]));
}

#[test]
fn search_and_construct_output() {
    let v = json(&grr(&["search-params", "--p", "5", "--f", "1"]));
    assert_eq!(v["parity"], "odd");
    assert!(v["census"].as_u64().unwrap() >= 1);
    let v = json(&grr(&["construct", "--p", "2", "--f", "3"]));
    assert_eq!(v["projective_orders"], serde_json::json!([2, 2, 2]));
    assert_eq!(v["product_order"], 9);
}

#[test]
fn output_file_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for path in [&a, &b] {
        let out = grr(&["--out", path.to_str().unwrap(), "certify", "--p", "5", "--f", "1"]);
        assert_eq!(out.status.code(), Some(0));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn export_graph_writes_edge_list() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g4.txt");
    let out = grr(&["export-graph", "--p", "2", "--f", "2", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("p edge 62400 93600\n0 "));
    let v = json(&out);
    assert_eq!(v["edge_count"], 93600);
    let digest = psu3_grr::cayley::content_hash(text.as_bytes());
    assert_eq!(v["edge_list_sha256"], digest);
}

#[test]
fn export_graph_is_gated() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g7.txt");
    let out = grr(&["export-graph", "--p", "7", "--f", "1", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!path.exists());
}

#[test]
fn negative_control_runs() {
    let out = grr(&["negative-control-q3"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["generating_triples"], 0);
    assert_eq!(v["group_order"], 6048);
}

#[test]
fn seed_variable_has_no_effect() {
    let plain = grr(&["certify", "--p", "2", "--f", "2"]);
    let seeded = Command::new(env!("CARGO_BIN_EXE_grr"))
        .args(["certify", "--p", "2", "--f", "2"])
        .env("GRR_SEED", "12345")
        .output()
        .unwrap();
    assert_eq!(plain.stdout, seeded.stdout);
}
