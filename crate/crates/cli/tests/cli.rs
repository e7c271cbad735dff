use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const A06: &str = r#"{"pauli": {"a": [0, 0, 0.6], "b": [0, 0, 0],
    "T": [[0.4, 0, 0], [0, -0.4, 0], [0, 0, 0.4]]}}"#;

const PHI_PLUS: &str = r#"{"matrix": [
    [[0.5, 0], [0, 0], [0, 0], [0.5, 0]],
    [[0, 0], [0, 0], [0, 0], [0, 0]],
    [[0, 0], [0, 0], [0, 0], [0, 0]],
    [[0.5, 0], [0, 0], [0, 0], [0.5, 0]]]}"#;

const MIXED: &str = r#"{"pauli": {"a": [0, 0, 0], "b": [0, 0, 0],
    "T": [[0, 0, 0], [0, 0, 0], [0, 0, 0]]}}"#;

fn entfilter(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_entfilter"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok_json(args: &[&str]) -> Value {
    let out = entfilter(args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("json report")
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn f(v: &Value) -> f64 {
    v.as_f64().unwrap_or_else(|| panic!("not a number: {v}"))
}

#[test]
fn analyze_bell_and_mixed() {
    let dir = TempDir::new().unwrap();
    let bell = write(&dir, "bell.json", PHI_PLUS);
    let r = ok_json(&["analyze", s(&bell), "--json"]);
    assert!((f(&r["concurrence"]) - 1.0).abs() < 1e-10);
    assert!((f(&r["eof"]) - 1.0).abs() < 1e-10);
    for side in ["alice", "bob"] {
        assert!(f(&r[side]["bloch_length"]) < 1e-12);
        assert!((f(&r[side]["optimal_ratio"]) - 1.0).abs() < 1e-12);
    }

    let mixed = write(&dir, "mixed.json", MIXED);
    let r = ok_json(&["analyze", s(&mixed), "--json"]);
    assert_eq!(f(&r["concurrence"]), 0.0);
    assert_eq!(f(&r["eof"]), 0.0);

    let text = entfilter(&["analyze", s(&mixed)]);
    let text = String::from_utf8(text.stdout).unwrap();
    assert!(text.starts_with("concurrence          0\n"), "{text}");
}

#[test]
fn analyze_random_state_is_self_consistent() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("r.json");
    assert!(entfilter(&["random", "--seed", "9", "--out", s(&path)]).status.success());
    let r = ok_json(&["analyze", s(&path), "--json"]);
    let l: Vec<f64> = r["lambdas"].as_array().unwrap().iter().map(f).collect();
    assert!(l.windows(2).all(|w| w[0] >= w[1]));
    let c = (l[0] - l[1] - l[2] - l[3]).max(0.0);
    assert!((f(&r["concurrence"]) - c).abs() < 1e-12);
    for side in ["alice", "bob"] {
        let a = f(&r[side]["bloch_length"]);
        assert!((f(&r[side]["purity"]) - 0.5 * (1.0 + a * a)).abs() < 1e-12);
        assert!((f(&r[side]["optimal_ratio"]) - 1.0 / (1.0 - a * a).sqrt()).abs() < 1e-12);
        assert!((f(&r[side]["optimal_probability"]) - (1.0 - a)).abs() < 1e-12);
    }
}

#[test]
fn random_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    entfilter(&["random", "--seed", "5", "--out", s(&a)]);
    entfilter(&["random", "--seed", "5", "--out", s(&b)]);
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn optimal_filter_examples() {
    let dir = TempDir::new().unwrap();
    let state = write(&dir, "a06.json", A06);
    let out = dir.path().join("f.json");
    let r = ok_json(&["optimal-filter", s(&state), "--side", "A", "--out", s(&out), "--json"]);
    assert!((f(&r["filter"]["x0"]) - 1.5).abs() < 1e-12);
    assert!((f(&r["filter"]["x"][2]) + 0.5).abs() < 1e-12);
    assert!((f(&r["predicted_ratio"]) - 1.25).abs() < 1e-12);
    assert!((f(&r["predicted_probability"]) - 0.4).abs() < 1e-12);
    let written: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(written["side"], "A");
    assert_eq!(f(&written["x0"]), 1.5);

    let mixed = write(&dir, "mixed.json", MIXED);
    let r = ok_json(&["optimal-filter", s(&mixed), "--side", "B", "--json"]);
    assert_eq!(f(&r["filter"]["x0"]), 2.0);
    assert_eq!(f(&r["predicted_ratio"]), 1.0);
    assert_eq!(f(&r["predicted_probability"]), 1.0);
}

#[test]
fn pure_marginal_is_rejected() {
    let dir = TempDir::new().unwrap();
    let pure = write(
        &dir,
        "pure.json",
        r#"{"pauli": {"a": [0, 0, 1], "b": [0, 0, 1], "T": [[0, 0, 0], [0, 0, 0], [0, 0, 1]]}}"#,
    );
    let out = entfilter(&["optimal-filter", s(&pure), "--side", "A"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("pure marginal"));
    assert!(out.stdout.is_empty());
}

#[test]
fn apply_examples_and_round_trip() {
    let dir = TempDir::new().unwrap();
    let state = write(&dir, "a06.json", A06);
    let filter = dir.path().join("f.json");
    entfilter(&["optimal-filter", s(&state), "--side", "A", "--out", s(&filter)]);
    let post = dir.path().join("post.json");
    let r = ok_json(&["apply", s(&state), s(&filter), "--out", s(&post), "--json"]);
    assert!((f(&r["achieved_ratio"]) - 1.25).abs() < 1e-8);
    assert!((f(&r["probability"]) - 0.4).abs() < 1e-12);
    let again = ok_json(&["analyze", s(&post), "--json"]);
    assert!((f(&again["concurrence"]) - f(&r["concurrence_after"])).abs() < 1e-9);

    let identity = write(&dir, "id.json", r#"{"x0": 2, "x": [0, 0, 0], "side": "B"}"#);
    let post_id = dir.path().join("post_id.json");
    let r = ok_json(&["apply", s(&state), s(&identity), "--out", s(&post_id), "--json"]);
    assert!((f(&r["probability"]) - 1.0).abs() < 1e-15);
    let before = ok_json(&["analyze", s(&state), "--json"]);
    let after = ok_json(&["analyze", s(&post_id), "--json"]);
    assert_eq!(before["T"], after["T"]);

    let bell = write(&dir, "bell.json", PHI_PLUS);
    let proj = write(&dir, "proj.json", r#"{"x0": 1, "x": [0, 0, 1], "side": "A"}"#);
    let r = ok_json(&["apply", s(&bell), s(&proj), "--json"]);
    assert!(f(&r["concurrence_after"]) < 1e-12);
    assert!((f(&r["probability"]) - 0.5).abs() < 1e-15);
}

#[test]
fn invalid_inputs_exit_with_one() {
    let dir = TempDir::new().unwrap();
    let state = write(&dir, "a06.json", A06);
    let bad_filter = write(&dir, "bad.json", r#"{"x0": 1.9, "x": [0.5, 0, 0], "side": "A"}"#);
    let out = entfilter(&["apply", s(&state), s(&bad_filter)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("x0 <= 2 - |x|"));

    let bad_trace = write(
        &dir,
        "trace.json",
        r#"{"matrix": [[[1,0],[0,0],[0,0],[0,0]],[[0,0],[1,0],[0,0],[0,0]],
            [[0,0],[0,0],[0,0],[0,0]],[[0,0],[0,0],[0,0],[0,0]]]}"#,
    );
    let out = entfilter(&["analyze", s(&bad_trace)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("trace must be 1"));

    let out = entfilter(&["analyze", s(&dir.path().join("missing.json"))]);
    assert_eq!(out.status.code(), Some(1));

    let mut orthogonal = A06.to_string();
    orthogonal.insert_str(1, r#""matrix": [], "#);
    let both = write(&dir, "both.json", &orthogonal);
    assert_eq!(entfilter(&["analyze", s(&both)]).status.code(), Some(1));
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(entfilter(&[]).status.code(), Some(2));
    assert_eq!(entfilter(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(entfilter(&["optimal-filter", "x.json", "--side", "C"]).status.code(), Some(2));
    assert_eq!(entfilter(&["sweep", "--min", "0"]).status.code(), Some(2));
}

#[test]
fn sweep_csv() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("sweep.csv");
    let out = entfilter(&["sweep", "--min", "0", "--max", "0.99", "--steps", "100", "--out", s(&path)]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(!text.contains('\r'));
    let mut reader = csv::Reader::from_path(&path).unwrap();
    assert_eq!(reader.headers().unwrap(), vec!["a", "ratio", "gain", "probability"]);
    let rows: Vec<[f64; 4]> = reader
        .records()
        .map(|r| {
            let r = r.unwrap();
            std::array::from_fn(|i| r[i].parse().unwrap())
        })
        .collect();
    assert_eq!(rows.len(), 100);
    assert_eq!(rows[0], [0.0, 1.0, 0.0, 1.0]);
    let r = rows[60];
    assert!((r[0] - 0.6).abs() < 1e-14 && (r[1] - 1.25).abs() < 1e-13);
    assert!((r[2] - 0.25).abs() < 1e-13 && (r[3] - 0.4).abs() < 1e-14);
    for w in rows.windows(2) {
        assert!(w[1][1] > w[0][1] && w[1][2] > w[0][2] && w[1][3] < w[0][3]);
    }
    for bad in [["0.5", "0.2", "10"], ["0", "1", "10"], ["0", "0.5", "1"], ["-0.1", "0.5", "10"]] {
        let out = entfilter(&["sweep", "--min", bad[0], "--max", bad[1], "--steps", bad[2], "--out", s(&path)]);
        assert_eq!(out.status.code(), Some(1), "{bad:?}");
    }
}

#[test]
fn verify_minimal_and_deterministic() {
    let dir = TempDir::new().unwrap();
    let report = dir.path().join("report.json");
    let a = entfilter(&["verify", "--seed", "3", "--trials", "1", "--report", s(&report)]);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stdout));
    let b = entfilter(&["verify", "--seed", "3", "--trials", "1"]);
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    assert!(text.contains("18 of 18 suites passed"), "{text}");
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(r["seed"], 3);
    assert!(r["suites"].as_array().unwrap().iter().all(|s| s["passed"] == true));
    assert_eq!(entfilter(&["verify", "--trials", "0"]).status.code(), Some(1));
}

#[test]
fn measure_matches_angle_form() {
    let dir = TempDir::new().unwrap();
    let state = write(&dir, "a06.json", A06);
    let m = write(&dir, "m.json", r#"{"theta": 1.2, "phi": 0.3}"#);
    let r = ok_json(&["measure", s(&state), s(&m), "--side", "B", "--json"]);
    let expected = 0.4 * (1.2f64 - 0.3).cos();
    assert!((f(&r["expected"]) - expected).abs() < 1e-9);
    assert!((f(&r["predicted"]) - expected).abs() < 1e-12);

    let r = ok_json(&["measure", s(&state), s(&m), "--bob", s(&m), "--json"]);
    assert!((f(&r["expected"]) - expected * (1.2f64 - 0.3).cos()).abs() < 1e-8);
}
