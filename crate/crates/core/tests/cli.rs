use std::fs;
use std::io::Write;
use std::path::Path;
use std::process::{Command, Output, Stdio};

use serde_json::Value;
use tempfile::TempDir;

fn qsl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qsl"))
        .args(args)
        .output()
        .expect("run qsl")
}

fn qsl_stdin(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_qsl"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("spawn qsl");
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn bounds_on_state_pair() {
    let dir = TempDir::new().unwrap();
    let input = write(
        dir.path(),
        "pair.json",
        r#"{"rho0": [[1, 0], [0, 0]], "rho_tau": [[0.5, 0.5], [0.5, 0.5]], "beta": "quadratic", "tau": 3}"#,
    );
    let o = qsl(&["bounds", "--input", &input]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r = json(&o);
    assert!((r["tau_qsl"].as_f64().unwrap() - 3.0).abs() < 1e-6);
    assert!((r["dist_d"].as_f64().unwrap() - std::f64::consts::FRAC_PI_3).abs() < 1e-12);
    let text = String::from_utf8_lossy(&o.stdout);
    let pos = |k: &str| text.find(&format!("\"{k}\"")).unwrap();
    assert!(pos("tau") < pos("length_d") && pos("length_d") < pos("dist_d") && pos("gap") < pos("nodes"));
}

#[test]
fn bounds_reads_stdin_and_models() {
    let o = qsl_stdin(
        &["bounds", "--input", "-"],
        r#"{"model": "dephasing", "rho0": [[0.5, 0.5], [0.5, 0.5]], "tau": 1}"#,
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!((json(&o)["ratio_qsl"].as_f64().unwrap() - 1.0).abs() < 1e-6);
}

#[test]
fn bounds_writes_summary_when_asked() {
    let dir = TempDir::new().unwrap();
    let input = write(
        dir.path(),
        "m.json",
        r#"{"model": "gad", "excited": [0.6], "tau": 0.5}"#,
    );
    let out = dir.path().join("out");
    let o = qsl(&["bounds", "--input", &input, "--dt", "0.01", "--out", s(&out)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let saved: Value = serde_json::from_str(&fs::read_to_string(out.join("bounds/summary.json")).unwrap()).unwrap();
    assert_eq!(saved, json(&o));
}

#[test]
fn exit_codes_follow_error_kind() {
    let dir = TempDir::new().unwrap();
    let bad_trace = write(
        dir.path(),
        "a.json",
        r#"{"rho0": [[0.5, 0], [0, 0.6]], "rho_tau": [[1, 0], [0, 0]]}"#,
    );
    let o = qsl(&["bounds", "--input", &bad_trace]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("TraceNotOne"));

    let not_psd = write(
        dir.path(),
        "b.json",
        r#"{"rho0": [[1.2, 0], [0, -0.2]], "rho_tau": [[1, 0], [0, 0]]}"#,
    );
    let o = qsl(&["bounds", "--input", &not_psd]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("NotPositive"));

    let garbage = write(dir.path(), "c.json", "{ not json");
    assert_eq!(code(&qsl(&["bounds", "--input", &garbage])), 2);

    let missing = dir.path().join("missing.json");
    assert_eq!(code(&qsl(&["bounds", "--input", s(&missing)])), 4);

    let cfg = write(dir.path(), "cfg.json", r#"{"experiment": "fig2", "bogus": 1}"#);
    assert_eq!(code(&qsl(&["fig2", "--config", &cfg])), 4);

    let cfg = write(
        dir.path(),
        "cfg2.json",
        r#"{"experiment": "fig2", "params": {"sample": 3}}"#,
    );
    let o = qsl(&["fig2", "--config", &cfg, "--out", s(dir.path())]);
    assert_eq!(code(&o), 4);
    assert!(String::from_utf8_lossy(&o.stderr).contains("sample"));

    let cfg = write(dir.path(), "cfg3.json", r#"{"experiment": "fig3a"}"#);
    assert_eq!(code(&qsl(&["fig2", "--config", &cfg])), 4);

    let cfg = write(
        dir.path(),
        "cfg4.json",
        r#"{"experiment": "fig3b", "params": {"c": 0.5}}"#,
    );
    assert_eq!(code(&qsl(&["fig3b", "--config", &cfg, "--out", s(dir.path())])), 4);
}

#[test]
fn numerical_failures_exit_3() {
    // an RK4 node lands on the first pole of the non-Markovian rate
    let dir = TempDir::new().unwrap();
    let pole = 2.0 * (std::f64::consts::PI - 3.0f64.atan()) / 3.0;
    let input = write(
        dir.path(),
        "m.json",
        &format!(
            r#"{{"model": "gad", "excited": [0.6], "law": {{"kind": "non-markov", "gamma0": 5, "lambda": 1}}, "tau": {}}}"#,
            2.0 * pole
        ),
    );
    let o = qsl(&["bounds", "--input", &input, "--dt", &format!("{}", pole / 10.0)]);
    assert_eq!(code(&o), 3, "{}", String::from_utf8_lossy(&o.stderr));
}

fn read(p: &Path) -> String {
    fs::read_to_string(p).unwrap_or_else(|e| panic!("{}: {e}", p.display()))
}

#[test]
fn fig2_is_deterministic_and_replayable() {
    let dir = TempDir::new().unwrap();
    let (a, b, c, d) = (
        dir.path().join("a"),
        dir.path().join("b"),
        dir.path().join("c"),
        dir.path().join("d"),
    );
    assert_eq!(
        code(&qsl(&["fig2", "--samples", "40", "--seed", "7", "--out", s(&a)])),
        0
    );
    assert_eq!(
        code(&qsl(&[
            "fig2",
            "--samples",
            "40",
            "--seed",
            "7",
            "--out",
            s(&b),
            "--svg"
        ])),
        0
    );
    assert_eq!(
        code(&qsl(&["fig2", "--samples", "40", "--seed", "8", "--out", s(&c)])),
        0
    );
    let csv_a = read(&a.join("fig2/data.csv"));
    assert_eq!(csv_a, read(&b.join("fig2/data.csv")));
    assert_ne!(csv_a, read(&c.join("fig2/data.csv")));
    assert!(read(&b.join("fig2/plot.svg")).starts_with("<svg"));
    assert!(!a.join("fig2/plot.svg").exists());

    let manifest = a.join("fig2/manifest.json");
    let m: Value = serde_json::from_str(&read(&manifest)).unwrap();
    assert_eq!(m["seed"], 7);
    assert_eq!(m["params"]["samples"], 40);
    assert_eq!(code(&qsl(&["fig2", "--config", s(&manifest), "--out", s(&d)])), 0);
    assert_eq!(csv_a, read(&d.join("fig2/data.csv")));
    assert_eq!(read(&manifest), read(&d.join("fig2/manifest.json")));
}

#[test]
fn csv_has_one_header_and_full_precision() {
    let dir = TempDir::new().unwrap();
    assert_eq!(code(&qsl(&["fig2", "--samples", "5", "--out", s(dir.path())])), 0);
    let text = read(&dir.path().join("fig2/data.csv"));
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("seed,purity,tau_qsl,tau_e,gap"));
    for line in lines {
        let cells: Vec<&str> = line.split(',').collect();
        assert_eq!(cells.len(), 5);
        for c in &cells[1..] {
            let mantissa = c.trim_start_matches('-').split('e').next().unwrap();
            assert_eq!(mantissa.len(), 18, "{c}");
            assert!(c.parse::<f64>().unwrap().is_finite());
        }
    }
    assert_eq!(read(&dir.path().join("fig2/errors.csv")), "id,reason\n");
}

#[test]
fn saturation_commands() {
    let dir = TempDir::new().unwrap();
    let o = qsl(&["saturation", "--model", "gad", "--dt", "0.001", "--out", s(dir.path())]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r = json(&o);
    assert!((r["ratio"].as_f64().unwrap() - 1.0).abs() < 1e-6);
    assert_eq!(r["saturated"], true);

    let o = qsl(&["saturation", "--model", "nonmarkov", "--out", s(dir.path())]);
    assert_eq!(code(&o), 0);
    let r = json(&o);
    assert_eq!(r["saturation_asserted"], false);
    assert!(r["closed_form_length"].is_null());
    assert!(String::from_utf8_lossy(&o.stderr).contains("warning"));
    assert!(read(&dir.path().join("nonmarkov/data.csv")).starts_with("t,v_d,v_e\n"));
}

#[test]
fn appendix_b_scan_and_broken_pipe() {
    let dir = TempDir::new().unwrap();
    let o = qsl(&["appendix-b", "--scan", "--out", s(dir.path())]);
    assert_eq!(code(&o), 0);
    let points = json(&o)["points"].as_array().unwrap().clone();
    assert_eq!(points.len(), 9);
    let geodesic: Vec<_> = points.iter().filter(|p| p["is_geodesic"] == true).collect();
    assert_eq!(geodesic.len(), 1);

    // closing stdout early must not turn into a panic
    let mut child = Command::new(env!("CARGO_BIN_EXE_qsl"))
        .args(["appendix-b", "--scan", "--out", s(dir.path())])
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    drop(child.stdout.take());
    let out = child.wait_with_output().unwrap();
    assert!(!String::from_utf8_lossy(&out.stderr).contains("panicked"));
}

#[test]
fn help_lists_every_command() {
    let o = qsl(&["--help"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8_lossy(&o.stdout);
    for c in ["bounds", "fig2", "fig3a", "fig3b", "saturation", "appendix-b"] {
        assert!(text.contains(c), "{c}");
    }
    assert_eq!(code(&qsl(&["fig9"])), 2);
}
