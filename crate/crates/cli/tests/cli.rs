//! Runs the `multistat` binary against the network corpus. Golden files live
//! in `tests/golden`; set `UPDATE_GOLDEN=1` to rewrite them.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use jsonschema::JSONSchema;
use serde_json::Value;

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn network(name: &str) -> PathBuf {
    root().join("networks").join(format!("{name}.crn"))
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_multistat")).args(args).output().expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("stdout is not JSON ({e}): {}", String::from_utf8_lossy(&out.stdout)))
}

fn schema() -> JSONSchema {
    let text = std::fs::read_to_string(root().join("docs/multistat.schema.json")).unwrap();
    JSONSchema::compile(&serde_json::from_str(&text).unwrap()).expect("schema compiles")
}

fn assert_schema(v: &Value) {
    let s = schema();
    let msgs: Vec<String> = match s.validate(v) {
        Ok(()) => return,
        Err(errors) => errors.map(|e| format!("{e} at {}", e.instance_path)).collect(),
    };
    panic!("schema violations: {msgs:#?}");
}

fn check_golden(name: &str, v: &Value) {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(format!("{name}.json"));
    let canonical = serde_json::to_string_pretty(v).unwrap() + "\n";
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::create_dir_all(path.parent().unwrap()).unwrap();
        std::fs::write(&path, &canonical).unwrap();
        return;
    }
    let stored = std::fs::read_to_string(&path).unwrap_or_else(|_| panic!("missing golden file {}", path.display()));
    let stored: Value = serde_json::from_str(&stored).unwrap();
    assert_eq!(serde_json::to_string_pretty(&stored).unwrap() + "\n", canonical, "golden mismatch for {name}");
}

const CORPUS: [&str; 9] = [
    "running",
    "pinned",
    "autocatalytic_n2_l1",
    "autocatalytic_n3_l1",
    "autocatalytic_n3_l2",
    "autocatalytic_n5_l4",
    "cubic_three",
    "two_inequality",
    "disconnected_six",
];

#[test]
fn analyze_matches_golden_and_schema() {
    for name in CORPUS {
        let out = run(&["analyze", network(name).to_str().unwrap()]);
        assert!(out.status.success(), "{name}: {}", String::from_utf8_lossy(&out.stderr));
        let v = json_of(&out);
        assert_schema(&v);
        assert_eq!(v["self_check"]["disagreements"], Value::Array(vec![]), "{name}");
        assert_eq!(v["multistationary"], Value::Bool(true), "{name}");
        check_golden(&format!("{name}.analyze"), &v);
    }
}

#[test]
fn region_matches_golden_and_schema() {
    for name in CORPUS {
        for kind in ["allowing", "enabling"] {
            let out = run(&["region", network(name).to_str().unwrap(), "--kind", kind]);
            assert!(out.status.success(), "{name}");
            let v = json_of(&out);
            assert_schema(&v);
            check_golden(&format!("{name}.{kind}"), &v);
        }
    }
}

#[test]
fn running_example_analysis() {
    let v = json_of(&run(&["analyze", network("running").to_str().unwrap()]));
    let texts: Vec<&str> = v["regions"]["enabling"]["pieces"][0]["conditions"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["text"].as_str().unwrap())
        .collect();
    assert_eq!(texts, ["c > 0", "k1*c^2 - 4*k2 > 0"]);
    assert_eq!(v["regions"]["allowing"]["pieces"][0]["conditions"], Value::Array(vec![]));
    assert_eq!(v["connectivity"]["enabling"]["value"], "connected");
}

#[test]
fn witness_at_given_rates() {
    let out = run(&["witness", network("running").to_str().unwrap(), "--rates", "1,1", "--totals", "5/2"]);
    assert!(out.status.success());
    let v = json_of(&out);
    assert_schema(&v);
    let xs: Vec<Value> = v["steady_states"].as_array().unwrap().iter().map(|s| s["x"].clone()).collect();
    assert_eq!(xs, vec![serde_json::json!(["1/2", "2"]), serde_json::json!(["2", "1/2"])]);
}

#[test]
fn witness_search_uses_region_witness() {
    let v = json_of(&run(&["witness", network("disconnected_six").to_str().unwrap()]));
    assert_schema(&v);
    assert_eq!(v["rates"], serde_json::json!(["1", "3", "4", "1", "1", "2"]));
    let xs: Vec<Value> = v["steady_states"].as_array().unwrap().iter().map(|s| s["x"][0].clone()).collect();
    assert_eq!(xs, vec![Value::from("1"), Value::from("2")]);
    check_golden("disconnected_six.witness", &v);
}

#[test]
fn count_roots_quadratic() {
    let v = json_of(&run(&["count-roots", "--poly", "x^2-3x+2"]));
    assert_schema(&v);
    assert_eq!((v["descartes"].as_u64(), v["sturm"].as_u64()), (Some(2), Some(2)));
    assert_eq!(v["trichotomy"]["positive_roots"], 2);
    assert_eq!(v["trichotomy"]["D"], "-1");
    let text = run(&["--format", "text", "count-roots", "--poly", "x^2-3x+2"]);
    assert!(String::from_utf8_lossy(&text.stdout).contains("trichotomy: 2 (D = -1)"));
}

#[test]
fn probe_reports_analytic_verdict_first() {
    let out = run(&["--format", "text", "probe", network("cubic_three").to_str().unwrap(), "--samples", "500", "--box", "0.0625:16"]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.starts_with("analytic: Connected"), "{text}");
    let v = json_of(&run(&["probe", network("disconnected_six").to_str().unwrap()]));
    assert_schema(&v);
    assert_eq!(v["probe"]["component_count"], 2);
    assert_eq!(v["probe"]["seed"], 42);
}

#[test]
fn probe_writes_csv() {
    let dir = std::env::temp_dir().join(format!("multistat-csv-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let csv = dir.join("samples.csv");
    let out = run(&["probe", network("cubic_three").to_str().unwrap(), "--samples", "200", "--csv", csv.to_str().unwrap()]);
    assert!(out.status.success());
    let body = std::fs::read_to_string(&csv).unwrap();
    let mut lines = body.lines();
    assert_eq!(lines.next(), Some("k1,k2,k3,component"));
    let accepted = json_of(&out)["probe"]["accepted_samples"].as_u64().unwrap() as usize;
    assert_eq!(lines.count(), accepted);
}

#[test]
fn parse_summary() {
    let v = json_of(&run(&["parse", network("running").to_str().unwrap()]));
    assert_schema(&v);
    assert_eq!(v["species"], serde_json::json!(["A", "B"]));
    assert_eq!(v["dimensions"]["d"], 1);
    assert_eq!(v["conservation_matrix"], serde_json::json!([["1", "1"]]));
}

#[test]
fn exit_codes() {
    let dir = std::env::temp_dir().join(format!("multistat-exit-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.crn");
    std::fs::write(&bad, "A -> -> B\n").unwrap();
    assert_eq!(run(&["parse", bad.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(run(&["parse", dir.join("missing.crn").to_str().unwrap()]).status.code(), Some(2));
    let three = dir.join("three.crn");
    std::fs::write(&three, "A + B -> C\nC -> A + B\n").unwrap();
    assert_eq!(run(&["analyze", three.to_str().unwrap()]).status.code(), Some(3));
    assert_eq!(run(&["region", three.to_str().unwrap()]).status.code(), Some(3));
    assert_eq!(run(&["count-roots", "--poly", "x^"]).status.code(), Some(2));
    assert_eq!(run(&["analyze", network("running").to_str().unwrap(), "--box", "2:1"]).status.code(), Some(2));
}

#[test]
fn seed_is_echoed_and_deterministic() {
    let a = run(&["--seed", "7", "probe", network("cubic_three").to_str().unwrap(), "--samples", "300"]);
    let b = run(&["--seed", "7", "probe", network("cubic_three").to_str().unwrap(), "--samples", "300"]);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(json_of(&a)["probe"]["seed"], 7);
}
