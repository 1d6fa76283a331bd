use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn genmeans(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_genmeans"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

const GINI_21: &str = r#"{"mean": {"pair": {"kind": "gini", "p": 2, "q": 1},
    "family": {"kind": "coordinates", "d": 3},
    "measure": {"kind": "uniform_indices", "n": 3}}, "x": [1, 2, 3]}"#;

#[test]
fn eval_prints_seventeen_digits() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "eval.json", GINI_21);
    let out = genmeans(&["eval", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout.clone()).unwrap();
    assert!(text.contains("2.3333333333333335"), "{text}");
    let v = json(&out);
    assert_eq!(v["command"], "eval");
    assert!((v["result"]["value"].as_f64().unwrap() - 14.0 / 6.0).abs() < 1e-15);
}

#[test]
fn echoed_config_reproduces_the_result() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "eval.json", GINI_21);
    let first = json(&genmeans(&["eval", "--config", &cfg]));
    let echoed = write(dir.path(), "echo.json", &first["config"].to_string());
    let second = json(&genmeans(&["eval", "--config", &echoed]));
    assert_eq!(first["result"], second["result"]);
    assert_eq!(first["config"], second["config"]);
}

#[test]
fn compare_global_gini_holds() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "g.json",
        r#"{"left": {"kind": "gini", "p": 1, "q": 0}, "right": {"kind": "gini", "p": 2, "q": 0},
            "family": {"kind": "coordinates", "d": 2}, "domain": [0, "inf"]}"#,
    );
    let out = genmeans(&["compare-global", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["result"]["verdict"]["status"], "Holds");
    assert_eq!(v["result"]["gini"]["verdict"]["status"], "Holds");
    assert_eq!(v["result"]["m_star"], "inf");
}

#[test]
fn compare_global_failure_exits_one_with_witness() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "g.json",
        r#"{"left": {"kind": "gini", "p": 2, "q": 0}, "right": {"kind": "gini", "p": 1, "q": 0},
            "family": {"kind": "coordinates", "d": 2}, "domain": [0, "inf"]}"#,
    );
    let out = genmeans(&["compare-global", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    assert_eq!(v["result"]["verdict"]["status"], "Fails");
    assert_eq!(v["result"]["verdict"]["witness"]["kind"], "pair");
}

#[test]
fn compare_global_other_forms() {
    let dir = tempfile::tempdir().unwrap();
    let qa = write(dir.path(), "q.json", r#"{"f": {"kind": "log"}, "h": {"kind": "identity"}, "domain": [0, "inf"]}"#);
    let out = genmeans(&["compare-global", "--config", &qa]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["result"]["convexity"]["status"], "Holds");
    let h = write(dir.path(), "h.json", r#"{"p": 3, "q": 1}"#);
    assert_eq!(genmeans(&["compare-global", "--config", &h]).status.code(), Some(1));
}

#[test]
fn gini_region_csv() {
    let out = genmeans(&["gini-region", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(!text.contains('\r'));
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "p,q,r,s,status,margin");
    assert_eq!(lines.len(), 1 + 17 * 17);
    for line in &lines[1..] {
        let f: Vec<&str> = line.split(',').collect();
        let (p, q): (f64, f64) = (f[0].parse().unwrap(), f[1].parse().unwrap());
        let expected = if p.min(q) <= 1.0 && p.max(q) <= 1.0 { "Holds" } else { "Fails" };
        assert_eq!(f[4], expected, "{line}");
    }
}

#[test]
fn local_comparison_with_oracle() {
    let dir = tempfile::tempdir().unwrap();
    let mean = |p: f64| {
        format!(
            r#"{{"pair": {{"kind": "gini", "p": {p}, "q": 0}}, "family": {{"kind": "segment"}}, "measure": {{"kind": "uniform01", "n": 32}}}}"#
        )
    };
    let cfg = write(
        dir.path(),
        "l.json",
        &format!(r#"{{"left": {}, "right": {}, "x0": 1, "oracle": true}}"#, mean(1.0), mean(2.0)),
    );
    let out = genmeans(&["compare-local", "--config", &cfg, "--samples", "64"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["result"]["verdict"]["status"], "Holds");
    assert_eq!(v["result"]["oracle"]["verdict"], "Dominates");
}

#[test]
fn derivatives_and_lemma2() {
    let dir = tempfile::tempdir().unwrap();
    let d = write(
        dir.path(),
        "d.json",
        r#"{"mean": {"pair": {"kind": "gini", "p": 1, "q": 0}, "family": {"kind": "segment"},
            "measure": {"kind": "uniform01"}}, "x0": 2, "finite_differences": true}"#,
    );
    let v = json(&genmeans(&["derivatives", "--config", &d]));
    assert!((v["result"]["gradient"][0].as_f64().unwrap() - 0.5).abs() < 1e-14);
    let l = write(
        dir.path(),
        "l.json",
        r#"{"pair": {"kind": "gini", "p": 2, "q": 0}, "family": {"kind": "coordinates", "d": 2},
            "t0": [1], "nu": {"kind": "dirac", "t": [2]}, "x": [1, 3]}"#,
    );
    let out = genmeans(&["lemma2", "--config", &l, "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("gamma,quotient,prediction,deviation\n"));
    assert_eq!(text.lines().count(), 21);
}

#[test]
fn verify_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "v.json", r#"{"scenarios": ["identity", "holder_grid", "lemma2_mixtures"]}"#);
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for (path, jobs) in [(&a, "1"), (&b, "2")] {
        let out = genmeans(&[
            "verify", "--config", &cfg, "--seed", "9", "--samples", "16", "--jobs", jobs, "--out",
            path.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}

#[test]
fn error_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(genmeans(&["eval"]).status.code(), Some(2));
    assert_eq!(genmeans(&["eval", "--config", "/nonexistent.json"]).status.code(), Some(2));
    let bad = write(dir.path(), "bad.json", r#"{"mean": {"pair": {"kind": "gini", "p": 1, "q": 0}}, "x": [1]}"#);
    assert_eq!(genmeans(&["eval", "--config", &bad]).status.code(), Some(2));
    let outside = write(
        dir.path(),
        "o.json",
        r#"{"mean": {"pair": {"kind": "gini", "p": 1, "q": 0}, "family": {"kind": "coordinates", "d": 2},
            "measure": {"kind": "uniform_indices", "n": 2}}, "x": [-1, 2]}"#,
    );
    assert_eq!(genmeans(&["eval", "--config", &outside]).status.code(), Some(2));
    let cfg = write(dir.path(), "e.json", GINI_21);
    assert_eq!(genmeans(&["eval", "--config", &cfg, "--format", "csv"]).status.code(), Some(2));
    // g = -x < 0: explicit evaluation needs a normalized pair
    let unnormalized = write(
        dir.path(),
        "u.json",
        r#"{"mean": {"pair": {"kind": "custom", "f": {"kind": "const", "c": 1}, "g": {"kind": "affine", "a": -1, "b": 0},
            "interval": [0, "inf"]},
            "family": {"kind": "coordinates", "d": 2}, "measure": {"kind": "uniform_indices", "n": 2}},
            "x": [1, 3], "method": "explicit"}"#,
    );
    let out = genmeans(&["eval", "--config", &unnormalized]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}
