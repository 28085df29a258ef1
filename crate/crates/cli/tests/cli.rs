use std::f64::consts::PI;
use std::process::{Command, Output};

use serde_json::Value;
use unidisc::criterion::{Certificate, Decision};

fn unidisc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_unidisc")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn float(v: &Value) -> f64 {
    v.as_str().expect("floats are strings").parse().unwrap()
}

#[test]
fn critical_nu0_json() {
    let doc: Value = serde_json::from_str(&stdout(&unidisc(&["critical", "--id", "nu0"]))).unwrap();
    assert_eq!(doc["schema_version"], 1);
    assert_eq!(doc["command"], "critical");
    assert_eq!(doc["results"]["id"], "nu0");
    let v = float(&doc["results"]["value"]);
    assert!((v + 0.5623).abs() < 5e-4);
    let keys: Vec<&String> = doc.as_object().unwrap().keys().collect();
    assert_eq!(keys, ["schema_version", "command", "inputs", "results", "diagnostics"]);
}

#[test]
fn zeros_csv() {
    let body = stdout(&unidisc(&["zeros", "--family", "bessel", "--nu", "0.5", "--n", "3"]));
    let mut lines = body.lines();
    assert_eq!(lines.next(), Some("n,zero"));
    let zeros: Vec<f64> = lines.map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert_eq!(zeros.len(), 3);
    for (k, z) in zeros.iter().enumerate() {
        assert!((z - (k + 1) as f64 * PI).abs() < 1e-9);
    }
}

#[test]
fn certify_struve_half_round_trips() {
    let body = stdout(&unidisc(&["certify", "--family", "struve", "--nu", "0.5"]));
    let doc: Value = serde_json::from_str(&body).unwrap();
    assert_eq!(doc["results"]["decision"], "holds");
    let cert = Certificate::from_value(doc["results"].clone()).unwrap();
    assert_eq!(cert.decision, Decision::Holds);

    let mut forged = doc["results"].clone();
    forged["criterion"]["tail_bound"] = "9.5e-1".into();
    assert!(Certificate::from_value(forged).is_err());
}

#[test]
fn negative_parameters_parse() {
    let body = stdout(&unidisc(&["certify", "--family", "lommel", "--mu", "-0.5", "--n", "50"]));
    let doc: Value = serde_json::from_str(&body).unwrap();
    assert_eq!(doc["results"]["zeros"]["family"], "phi1");
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        &["zeros", "--family", "bessel", "--n", "3"][..],
        &["zeros", "--family", "nope", "--nu", "0", "--n", "3"],
        &["eval", "--family", "bessel_f", "--nu", "-1.5", "--x", "0.5"],
        &["critical", "--id", "nu0", "--tol", "1e-15"],
        &["reproduce", "--format", "csv"],
    ] {
        let out = unidisc(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        let diag: Value = serde_json::from_slice(&out.stderr).unwrap();
        assert_eq!(diag["error"], "usage");
    }
}

#[test]
fn numerical_failure_exits_1() {
    let out = Command::new(env!("CARGO_BIN_EXE_unidisc"))
        .args(["eval", "--family", "raw_bessel_j", "--nu", "0", "--x", "50"])
        .env("UNIDISC_MAX_TERMS", "10")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let diag: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(diag["error"], "truncation");
    assert_eq!(diag["command"], "eval");
}

#[test]
fn probe_csv_columns() {
    let body = stdout(&unidisc(&[
        "probe", "--family", "bessel", "--nu", "1", "--functional", "starlike_re", "--radii", "0.5,1",
        "--angles", "64", "--format", "csv",
    ]));
    let mut lines = body.lines();
    assert_eq!(lines.next(), Some("r,theta,re_value"));
    assert_eq!(lines.count(), 128);
}

#[test]
fn output_file() {
    let path = std::env::temp_dir().join(format!("unidisc-cli-{}.csv", std::process::id()));
    let p = path.to_str().unwrap();
    let out = unidisc(&["zeros", "--family", "struve", "--nu", "-0.5", "--n", "2", "--output", p]);
    assert!(out.status.success() && out.stdout.is_empty());
    let body = std::fs::read_to_string(&path).unwrap();
    std::fs::remove_file(&path).unwrap();
    assert!(body.starts_with("n,zero\n1,3.14159265359e0\n"));
}

#[test]
fn reproduce_is_byte_identical() {
    let a = unidisc(&["reproduce"]);
    let b = unidisc(&["reproduce"]);
    assert_eq!(stdout(&a), stdout(&b));
    let doc: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(doc["results"]["all_pass"], true);
}
