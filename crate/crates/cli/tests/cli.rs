use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn kor(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kor")).args(args).output().unwrap()
}

fn fixture() -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../core/data/fixture_a.kor")
        .to_string_lossy()
        .into_owned()
}

fn lines(out: &Output) -> Vec<Value> {
    String::from_utf8_lossy(&out.stdout)
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect()
}

#[test]
fn two_keyword_fixture_query() {
    let g = fixture();
    let out = kor(&[
        "query", "--graph", &g, "--algo", "osscaling", "--source", "0", "--target", "7", "--delta", "10",
        "--keywords", "t1,t2", "--epsilon", "0.5",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let rows = lines(&out);
    assert_eq!(rows.len(), 1);
    let r = &rows[0];
    assert_eq!(r["objective"], 6.0);
    assert_eq!(r["budget"], 10.0);
    assert_eq!(r["route"], serde_json::json!([0, 2, 3, 4, 7]));
    for field in ["query", "algorithm", "params", "feasible", "runtime_ms", "labels_generated"] {
        assert!(r.get(field).is_some(), "missing {field}");
    }
}

#[test]
fn unknown_flag_is_usage_error() {
    let out = kor(&["query", "--graph", &fixture(), "--frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bad_parameter_is_usage_error() {
    let g = fixture();
    let out = kor(&[
        "query", "--graph", &g, "--source", "0", "--target", "7", "--delta", "10", "--keywords", "t1",
        "--epsilon", "1.5",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let out = kor(&["query", "--graph", &g, "--source", "0", "--target", "99", "--delta", "10"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn infeasible_query_reports_reason() {
    let out = kor(&[
        "query", "--graph", &fixture(), "--algo", "bucketbound", "--source", "0", "--target", "7", "--delta",
        "4.5", "--keywords", "t1",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let rows = lines(&out);
    assert_eq!(rows[0]["feasible"], false);
    assert!(rows[0]["reason"].is_string());
}

#[test]
fn missing_graph_is_io_error() {
    let out = kor(&["query", "--graph", "/nonexistent/g.kor", "--source", "0", "--target", "1", "--delta", "1"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn preprocess_then_query_with_tables() {
    let dir = tempfile::tempdir().unwrap();
    let pre = dir.path().join("a.pre");
    let pre = pre.to_str().unwrap();
    let g = fixture();
    assert_eq!(kor(&["preprocess", "--graph", &g, "--out", pre]).status.code(), Some(0));
    for algo in ["osscaling", "bucketbound", "greedy", "oracle"] {
        let out = kor(&[
            "query", "--graph", &g, "--pre", pre, "--algo", algo, "--source", "0", "--target", "7", "--delta",
            "10", "--keywords", "t1,t2",
        ]);
        assert_eq!(out.status.code(), Some(0), "{algo}");
        assert_eq!(lines(&out)[0]["algorithm"], algo);
    }
    let out = kor(&[
        "oracle", "--graph", &g, "--pre", pre, "--source", "0", "--target", "7", "--delta", "6", "--keywords",
        "t1,t2,t3",
    ]);
    assert_eq!(lines(&out)[0]["route"], serde_json::json!([0, 3, 5, 7]));
}

#[test]
fn corrupt_tables_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let pre = dir.path().join("bad.pre");
    std::fs::write(&pre, b"not tables").unwrap();
    let out = kor(&[
        "query", "--graph", &fixture(), "--pre", pre.to_str().unwrap(), "--source", "0", "--target", "7",
        "--delta", "10",
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn gen_is_reproducible_and_bench_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.kor");
    let b = dir.path().join("b.kor");
    for p in [&a, &b] {
        let out = kor(&["gen", "--nodes", "80", "--degree", "3", "--vocab", "6", "--seed", "9", "--out", p.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());

    let config = dir.path().join("bench.json");
    std::fs::write(
        &config,
        format!(
            r#"{{"graph": {{"file": "{}"}},
                "queries": {{"count": 3, "keywords": [2], "delta": 15.0, "reach": 8.0}},
                "algorithms": [{{"algo": "bucketbound"}}, {{"algo": "greedy"}}]}}"#,
            a.display()
        ),
    )
    .unwrap();
    let report = dir.path().join("report.json");
    let out = kor(&["bench", "--config", config.to_str().unwrap(), "--out", report.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report: Value = serde_json::from_str(&std::fs::read_to_string(report).unwrap()).unwrap();
    assert_eq!(report["rows"].as_array().unwrap().len(), 6);
}
