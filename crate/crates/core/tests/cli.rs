//! End-to-end runs of the `econvex` binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use econvex::io::{parse_table_csv, FunctionSpec, TableJson};
use tempfile::TempDir;

fn econvex(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_econvex")).args(args).output().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

struct Specs {
    dir: TempDir,
}

impl Specs {
    fn new() -> Self {
        let dir = TempDir::new().unwrap();
        let d = dir.path();
        write(d, "negsq.json", r#"{"kind":"closed-form","name":"neg_square"}"#);
        write(d, "abs.json", r#"{"kind":"closed-form","name":"abs"}"#);
        write(d, "well.json", r#"{"kind":"closed-form","name":"quartic_well"}"#);
        write(d, "quad.json", r#"{"kind":"quadratic","scale":1.0}"#);
        write(d, "zero.json", r#"{"kind":"zero"}"#);
        Specs { dir }
    }

    fn path(&self, name: &str) -> String {
        self.dir.path().join(name).to_str().unwrap().to_string()
    }
}

#[test]
fn conjugate_csv_and_json() {
    let s = Specs::new();
    let (f, e) = (s.path("negsq.json"), s.path("quad.json"));
    let (csv, json) = (s.path("t.csv"), s.path("t.json"));
    let base = ["conjugate", "--f", &f, "--e", &e, "--y", "1.0", "--grid", "-2,2,401", "--dual", "-6,6,241", "--algo", "fast"];
    let out = econvex(&[&base[..], &["--out", &csv]].concat());
    assert_eq!(out.status.code(), Some(0));
    let (slopes, values) = parse_table_csv(&std::fs::read_to_string(&csv).unwrap()).unwrap();
    assert_eq!(slopes.len(), 241);
    let j = slopes.iter().position(|&s| s == -2.0).unwrap();
    assert!((values[j].value() + 1.0).abs() < 1e-12);

    assert_eq!(econvex(&[&base[..], &["--out", &json]].concat()).status.code(), Some(0));
    let doc: TableJson = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!((doc.slopes, doc.values), (slopes, values));
    assert_eq!(doc.provenance.anchor_y, 1.0);
    assert_eq!(doc.provenance.primal_grid.len, 401);
}

#[test]
fn subdiff_of_abs() {
    let s = Specs::new();
    let out = econvex(&["subdiff", "--f", &s.path("abs.json"), "--e", &s.path("zero.json"), "--at", "0", "--grid", "-1,1,201"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v, serde_json::json!({"lower": -1.0, "upper": 1.0, "empty": false}));
}

#[test]
fn input_errors_exit_2() {
    let s = Specs::new();
    let bad = write(s.dir.path(), "bad.json", "{\"kind\":\"quadratic\",\"scal\":1}");
    let out = econvex(&["subdiff", "--f", &s.path("abs.json"), "--e", bad.to_str().unwrap(), "--at", "0", "--grid", "-1,1,201"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("scal"));

    let off = econvex(&["subdiff", "--f", &s.path("abs.json"), "--e", &s.path("zero.json"), "--at", "0.003", "--grid", "-1,1,201"]);
    assert_eq!(off.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&off.stderr).contains("off-grid"));

    assert_eq!(econvex(&["conjugate", "--f", "missing.json"]).status.code(), Some(2));
}

#[test]
fn verification_failure_exits_1_with_report() {
    let s = Specs::new();
    let report = s.path("r.json");
    let out = econvex(&["check-econvex", "--f", &s.path("negsq.json"), "--e", &s.path("zero.json"), "--grid", "-1,1,21", "--out", &report]);
    assert_eq!(out.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(v["passed"], false);
    assert!(v["definition"]["max_violation"].as_f64().unwrap() > 0.0);

    let ok = econvex(&["check-econvex", "--f", &s.path("negsq.json"), "--e", &s.path("quad.json"), "--grid", "-1,1,21"]);
    assert_eq!(ok.status.code(), Some(0));
}

#[test]
fn certify_and_stability() {
    let s = Specs::new();
    let (f, e) = (s.path("well.json"), s.path("quad.json"));
    let out = econvex(&["certify", "--f", &f, "--e", &e, "--at", "0.71", "--grid", "-1.5,1.5,301", "--kind", "local"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["certified"], true);

    let q = s.path("quad.json");
    let out = econvex(&["certify", "--f", &s.path("abs.json"), "--e", &s.path("zero.json"), "--at", "0.5", "--grid", "-1,1,21"]);
    assert_eq!(out.status.code(), Some(1));

    let out = econvex(&["stability", "--f", &s.path("abs.json"), "--e", &q, "--y", "-0.5", "--y2", "0.5", "--grid", "-1,1,41"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn biconjugate_and_infconv_round_trip_through_spec_files() {
    let s = Specs::new();
    let bic = s.path("b.json");
    let out = econvex(&[
        "biconjugate", "--f", &s.path("abs.json"), "--e", &s.path("zero.json"), "--y", "0", "--grid", "-1,1,21",
        "--dual", "-2,2,41", "--out", &bic,
    ]);
    assert_eq!(out.status.code(), Some(0));
    let spec: FunctionSpec = serde_json::from_str(&std::fs::read_to_string(&bic).unwrap()).unwrap();
    let FunctionSpec::Sampled { grid, values } = &spec else { panic!() };
    for (x, v) in grid.iter().zip(values) {
        assert!((v.value() - x.abs()).abs() < 1e-12);
    }

    // The written file is itself a valid function input.
    let ic = econvex(&["infconv", "--f", &bic, "--g", &bic, "--out-grid", "-1,1,11", "--format", "csv"]);
    assert_eq!(ic.status.code(), Some(0));
    let text = String::from_utf8(ic.stdout).unwrap();
    assert!(text.starts_with("x,value\n"));
    assert_eq!(text.lines().count(), 12);
}

#[test]
fn suite_json_records_seed() {
    let s = Specs::new();
    let path = s.path("suite.json");
    let out = econvex(&["suite", "--seed", "7", "--instances", "12", "--out", &path]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("econvex-def"));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), econvex::verify::PROPERTY_IDS.len());
    assert!(rows.iter().all(|r| r["seed"] == 7));
}

#[test]
fn thread_cap_does_not_change_output() {
    let s = Specs::new();
    let args = ["conjugate", "--f", &s.path("negsq.json"), "--e", &s.path("quad.json"), "--y", "0.3", "--grid", "-2,2,101", "--algo", "brute"];
    let a = econvex(&args);
    let b = Command::new(env!("CARGO_BIN_EXE_econvex")).args(args).env("ECONVEX_THREADS", "1").output().unwrap();
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}
