use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn qsdpi(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qsdpi")).args(args).output().expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("report is JSON")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn eta_report_for_depolarizing() {
    let dir = tempfile::tempdir().unwrap();
    let ch = write(dir.path(), "dep.json", r#"{"kind": "depolarizing", "p": 0.5}"#);
    let out = qsdpi(&["eta", "--channel", s(&ch)]);
    assert!(out.status.success());
    let r = json(&out);
    assert!((r["closed_form"].as_f64().unwrap() - 0.25).abs() < 1e-12);
    assert!(r["estimate"].as_f64().unwrap() >= 0.249);
    assert_eq!(r["seed"], 0);
    assert_eq!(r["channel"]["kind"], "depolarizing");
    assert!(String::from_utf8_lossy(&out.stderr).contains("elapsed"));
}

#[test]
fn reports_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let ch = write(dir.path(), "ad.json", r#"{"kind": "amplitude_damping", "gamma": 0.3}"#);
    let a = qsdpi(&["eta", "--channel", s(&ch), "--seed", "7", "--restarts", "4"]);
    let b = qsdpi(&["eta", "--channel", s(&ch), "--seed", "7", "--restarts", "4"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn degrade_and_assert_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let m = write(dir.path(), "m.json", r#"{"kind": "depolarizing", "p": 0.2}"#);
    let n = write(
        dir.path(),
        "n.json",
        r#"{"kind": "compose", "outer": {"kind": "bitflip", "p": 0.3}, "inner": {"kind": "depolarizing", "p": 0.2}}"#,
    );
    let out = qsdpi(&["order", "degrade", "--channel", s(&m), "--channel2", s(&n), "--assert"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["verdict"]["status"], "certified");
    assert!(r["verdict"]["eps"].as_f64().unwrap() <= 1e-6);

    let out = qsdpi(&["order", "degrade", "--channel", s(&n), "--channel2", s(&m), "--assert"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["verdict"]["status"], "falsified");
    let out = qsdpi(&["order", "degrade", "--channel", s(&n), "--channel2", s(&m)]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn less_noisy_reverse_erasure_is_falsified() {
    let dir = tempfile::tempdir().unwrap();
    let a = write(dir.path(), "a.json", r#"{"kind": "erasure", "eps": 0.2}"#);
    let b = write(dir.path(), "b.json", r#"{"kind": "erasure", "eps": 0.6}"#);
    let out = qsdpi(&["order", "less-noisy", "--channel", s(&b), "--channel2", s(&a), "--assert", "--trials", "50"]);
    assert_eq!(out.status.code(), Some(2));
    let r = json(&out);
    assert_eq!(r["verdict"]["witness"]["type"], "pair");
    assert!(r["verdict"]["gap"].as_f64().unwrap() > 1e-3);
}

#[test]
fn errors_exit_with_one() {
    let out = qsdpi(&["eta", "--channel", "/nonexistent/channel.json"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("file not found"));

    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.json", r#"{"kind": "depolarizing"}"#);
    assert_eq!(qsdpi(&["eta", "--channel", s(&bad)]).status.code(), Some(1));
    let bad = write(dir.path(), "p.json", r#"{"kind": "depolarizing", "p": 1.5}"#);
    assert_eq!(qsdpi(&["eta", "--channel", s(&bad)]).status.code(), Some(1));
    assert_eq!(qsdpi(&["figure2", "--p-grid", "0.5,1.2"]).status.code(), Some(1));
    assert_eq!(qsdpi(&["eta"]).status.code(), Some(1));
    assert_eq!(qsdpi(&["eta", "--channel", "x", "--tol", "-1"]).status.code(), Some(1));
    assert_eq!(qsdpi(&["--help"]).status.code(), Some(0));
}

#[test]
fn figure2_defaults_to_csv() {
    let out = qsdpi(&["figure2", "--p-grid", "0,0.5,1"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    assert_eq!(rdr.headers().unwrap(), vec!["p", "lower", "upper_tight", "upper_loose", "lower_loose"]);
    let rows: Vec<Vec<f64>> = rdr
        .records()
        .map(|r| r.unwrap().iter().map(|x| x.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 3);
    assert_eq!(rows[0][1], 1.0);
    assert_eq!(rows[0][2], 1.0);
    assert_eq!(rows[2][2], 0.5);
    assert!((rows[1][1] - 0.5943).abs() < 1e-4);
    assert!(!text.contains('\r'));
    let full = qsdpi(&["figure2"]);
    assert_eq!(String::from_utf8(full.stdout).unwrap().lines().count(), 22);
}

#[test]
fn bits_rescale_entropic_values() {
    let out = qsdpi(&["gaussian", "g-check"]);
    assert!(out.status.success());
    let dir = tempfile::tempdir().unwrap();
    let m = write(dir.path(), "m.json", r#"{"kind": "depolarizing", "p": 0.2}"#);
    let n = write(dir.path(), "n.json", r#"{"kind": "depolarizing", "p": 0.5}"#);
    let nats = json(&qsdpi(&["order", "approx", "--channel", s(&m), "--channel2", s(&n)]));
    let bits = json(&qsdpi(&["order", "approx", "--channel", s(&m), "--channel2", s(&n), "--bits"]));
    assert_eq!(bits["units"], "bits");
    let (a, b) = (nats["eps_tilde"].as_f64().unwrap(), bits["eps_tilde"].as_f64().unwrap());
    assert!((a / std::f64::consts::LN_2 - b).abs() < 1e-12);
    assert_eq!(nats["eps_deg"], bits["eps_deg"]);
}

#[test]
fn out_flag_writes_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.json");
    let out = qsdpi(&["gaussian", "eta", "--family", "additive", "--E", "1", "--E1", "1", "--out", s(&path)]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert!((r["closed_form"].as_f64().unwrap() - 0.58496).abs() < 1e-5);
    assert_eq!(r["unconditional"], true);
}

#[test]
fn gaussian_sweep_table() {
    let out = qsdpi(&["gaussian", "sweep", "--family", "additive", "--E", "1", "--E1", "1"]);
    assert!(out.status.success());
    let r = json(&out);
    let rows = r["table"].as_array().unwrap();
    assert_eq!(rows.len(), 3);
    let last = rows[2]["ratio"].as_f64().unwrap();
    assert!((last - 0.58496).abs() < 1e-3);
    assert_eq!(r["increasing"], true);
    let out = qsdpi(&["gaussian", "eta", "--family", "amplifier", "--E", "0.5", "--E1", "1"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn weyl_build_output_is_a_channel_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = qsdpi(&["weyl", "build", "--n", "2", "--delta", "0.3", "--shift", "1,1"]);
    assert!(out.status.success());
    let r = json(&out);
    let ch = write(dir.path(), "w.json", &r["channel"].to_string());
    let e = qsdpi(&["eta", "--channel", s(&ch), "--restarts", "2"]);
    assert!(e.status.success(), "{}", String::from_utf8_lossy(&e.stderr));

    let out = qsdpi(&["weyl", "degrade-test", "--n", "2", "--delta", "0.2", "--gamma", "0.5,0.96"]);
    let rows = json(&out)["table"].as_array().unwrap().clone();
    assert_eq!(rows[0]["degradable"], true);
    assert_eq!(rows[1]["degradable"], false);
    for row in &rows {
        assert_eq!(row["degradable"], row["expected"]);
    }
    let g = json(&qsdpi(&["weyl", "gamma0", "--n", "2", "--delta", "0.3"]));
    assert!((g["gamma0"].as_f64().unwrap() - 0.9545).abs() < 1e-4);
}

#[test]
fn kraus_channel_file() {
    let dir = tempfile::tempdir().unwrap();
    // Amplitude damping with γ = 0.36.
    let ch = write(
        dir.path(),
        "k.json",
        r#"{"kind": "kraus", "dim_in": 2, "dim_out": 2,
            "ops": [[[[1, 0], [0, 0]], [[0, 0], [0.8, 0]]], [[[0, 0], [0.6, 0]], [[0, 0], [0, 0]]]]}"#,
    );
    let out = qsdpi(&["capacity", "--channel", s(&ch), "--quantity", "q1", "--bounds", "deg"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let r = json(&out);
    assert!(r["q1"]["value"].as_f64().unwrap() > 0.0);
    assert!(r["chi"].is_null());
    // Amplitude damping below γ = ½ is degradable.
    assert!(r["bounds"]["eps"].as_f64().unwrap() < 1e-6);

    let wrong = write(dir.path(), "w.json", r#"{"kind": "kraus", "dim_in": 3, "dim_out": 2, "ops": [[[1, 0], [0, 1]]]}"#);
    assert_eq!(qsdpi(&["eta", "--channel", s(&wrong)]).status.code(), Some(1));
}

#[test]
fn lsi_report_labels_forms() {
    let dir = tempfile::tempdir().unwrap();
    let a = write(dir.path(), "a.json", r#"{"kind": "depolarizing", "p": 0.5}"#);
    let b = write(dir.path(), "b.json", r#"{"kind": "depolarizing", "p": 0.25}"#);
    let out = qsdpi(&["lsi", "--channel", s(&a), "--channel2", s(&b), "--sdpi-p", "0.5", "--restarts", "2"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let r = json(&out);
    for form in ["continuous", "discrete"] {
        assert!(r["estimate"][form]["value"].as_f64().unwrap() > 0.0);
    }
    assert!((r["comparison"]["continuous"]["lambda"].as_f64().unwrap() - 2.0).abs() < 1e-8);
    assert!((r["sdpi"]["constant"].as_f64().unwrap() - 0.25).abs() < 1e-12);
    assert_eq!(r["reversible"], true);
}

#[test]
fn golden_reports() {
    let golden = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden");
    let cases: &[(&str, &[&str])] = &[
        ("figure2.csv", &["figure2"]),
        ("gaussian_eta_additive.json", &["gaussian", "eta", "--family", "additive", "--E", "1", "--E1", "1,2,0.5"]),
        (
            "gaussian_eta_attenuator.json",
            &["gaussian", "eta", "--family", "attenuator", "--lambda", "0.6", "--E", "0.4", "--E1", "1"],
        ),
        ("weyl_gamma0.json", &["weyl", "gamma0", "--n", "2", "--delta", "0.3"]),
        (
            "weyl_degrade_test.csv",
            &["weyl", "degrade-test", "--n", "2", "--delta", "0.2", "--gamma", "0.1,0.5,0.96", "--format", "csv"],
        ),
        ("weyl_build.json", &["weyl", "build", "--n", "3", "--delta", "0.3", "--shift", "1,2"]),
    ];
    for (file, args) in cases {
        let want = std::fs::read_to_string(golden.join(file)).unwrap();
        let out = qsdpi(args);
        assert!(out.status.success(), "{file}");
        assert_eq!(String::from_utf8(out.stdout).unwrap(), want, "{file}");
    }
}
