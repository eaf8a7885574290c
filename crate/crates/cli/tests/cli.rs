use std::f64::consts::PI;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spherekern")).current_dir(dir).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("stdout is JSON")
}

fn write(dir: &Path, name: &str, text: &str) {
    fs::write(dir.join(name), text).unwrap();
}

fn antipodal_pair(dir: &Path) {
    write(
        dir,
        "pair.csv",
        &format!("# d=3, repr=polar\npolar,0.7,1.1\npolar,{},{}\n", 0.7 + PI, PI - 1.1),
    );
}

#[test]
fn constant_harmonic_is_one() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["eval", "--index", "0,0", "--point", "polar:0.3,1.0"]);
    assert_eq!(code(&o), 0);
    let v = &json(&o)["result"]["values"][0]["value"];
    assert!((v[0].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert_eq!(v[1].as_f64().unwrap(), 0.0);
}

#[test]
fn missing_scheme_file_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["gram", "--scheme", "nope.json", "--n", "3"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("nope.json"));
}

#[test]
fn addition_test_passes_and_detects_a_perturbed_constant() {
    let dir = tempfile::tempdir().unwrap();
    let ok = run(dir.path(), &["addition-test", "--d", "4", "--k-max", "10", "--pairs", "10"]);
    assert_eq!(code(&ok), 0);
    assert_eq!(json(&ok)["result"]["pass"], true);
    let bad = run(dir.path(), &["addition-test", "--d", "4", "--k-max", "10", "--pairs", "10", "--perturb", "1e-3"]);
    assert_eq!(code(&bad), 1);
    assert_eq!(json(&bad)["result"]["pass"], false);
}

#[test]
fn even_scheme_on_antipodal_pair_has_a_witness() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "even.json", r#"{"d": 3, "k_max": 8, "rule": "even"}"#);
    antipodal_pair(dir.path());
    let o = run(dir.path(), &["check-spd", "--scheme", "even.json", "--points", "pair.csv"]);
    assert_eq!(code(&o), 1);
    let r = json(&o);
    assert_ne!(r["result"]["verdict"], "positive_definite");
    let w = run(dir.path(), &["witness", "--scheme", "even.json", "--points", "pair.csv"]);
    assert_eq!(code(&w), 0);
    let c = json(&w)["result"]["witness"].clone();
    let a = c[0][0].as_f64().unwrap();
    let b = c[1][0].as_f64().unwrap();
    assert!((a.abs() - 0.5f64.sqrt()).abs() < 1e-9 && (a + b).abs() < 1e-9);
}

#[test]
fn full_scheme_is_positive_definite_on_random_points() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "full.json", r#"{"d": 3, "k_max": 12, "rule": "full"}"#);
    let o = run(dir.path(), &["check-spd", "--scheme", "full.json", "--n", "20", "--seed", "7"]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["result"]["verdict"], "positive_definite");
}

#[test]
fn duplicate_points_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "full.json", r#"{"d": 3, "k_max": 4, "rule": "full"}"#);
    write(dir.path(), "dup.csv", "# d=3, repr=polar\npolar,0.7,1.1\npolar,0.7,1.1\n");
    let o = run(dir.path(), &["check-spd", "--scheme", "full.json", "--points", "dup.csv"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn certify_lohofer_passes() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["certify", "lohofer", "--degree-max", "20"]);
    assert_eq!(code(&o), 0);
    let r = json(&o);
    assert_eq!(r["result"]["violations"], 0);
    assert_eq!(r["config"]["degree_max"], 20);
}

#[test]
fn certify_rates_writes_parity_csvs() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "jz.json", r#"{"d": 5, "k_max": 30, "rule": "jzero", "j": 2}"#);
    let o = run(dir.path(), &["certify", "rates", "--scheme", "jz.json", "--j", "2", "--csv-prefix", "out"]);
    // The complement grows like k^3, so the rate check is not met.
    assert_eq!(code(&o), 1);
    for name in ["out_even.csv", "out_odd.csv"] {
        let text = fs::read_to_string(dir.path().join(name)).unwrap();
        assert!(text.starts_with("degree,value\n"));
        assert!(text.lines().count() > 10);
    }
}

#[test]
fn unknown_bound_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&run(dir.path(), &["certify", "nonsense"])), 2);
}

#[test]
fn csv_output_for_tau() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["tau", "--d", "3", "--k-max", "2", "--format", "csv"]);
    assert_eq!(code(&o), 0);
    assert_eq!(String::from_utf8(o.stdout).unwrap().lines().count(), 5);
}

#[test]
fn isotropic_verdicts() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "even.json", r#"{"d": 3, "k_max": 6, "rule": "even"}"#);
    let rp = run(dir.path(), &["rates", "isotropic", "--scheme", "even.json", "--family", "real-projective"]);
    assert_eq!(code(&rp), 0);
    let sphere = run(dir.path(), &["rates", "isotropic", "--scheme", "even.json"]);
    assert_eq!(code(&sphere), 2);
}

#[test]
fn output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "full.json", r#"{"d": 4, "k_max": 5, "rule": "full"}"#);
    let args = ["gram", "--scheme", "full.json", "--n", "6", "--seed", "11"];
    let a = run(dir.path(), &args);
    let b = run(dir.path(), &args);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let r = json(&a);
    assert_eq!(r["schema"], "spherekern/1");
    assert_eq!(r["config"]["seed"], 11);
}
