//! End-to-end tests of the `hilbert` binary.

use std::f64::consts::PI;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn hilbert(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hilbert")).args(args).env_remove("HILBERT_WORKERS").output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

fn strip_runtime(mut v: Value) -> Value {
    v.as_object_mut().unwrap().remove("runtime_seconds");
    v
}

#[test]
fn identities_pass() {
    let o = hilbert(&["identities"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(json(&o)["details"]["all_pass"], Value::Bool(true));
}

#[test]
fn carleson_dirac_half() {
    let o = hilbert(&["carleson", "--measure", "dirac:0.5", "--p", "2", "--alpha", "0", "--s", "1", "--grid-size", "257"]);
    assert_eq!(code(&o), 0);
    let d = &json(&o)["details"];
    assert!((d["sup_ratio"].as_f64().unwrap() - 2.0).abs() < 1e-12);
    assert_eq!(d["argmax_t"].as_f64().unwrap(), 0.5);
    assert_eq!(d["carleson_verdict"], "bounded");
}

#[test]
fn norm_brackets_pi() {
    let o = hilbert(&["norm", "--measure", "lebesgue", "--p", "2", "--alpha", "0"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r = json(&o);
    let (lo, up) = (r["lower"].as_f64().unwrap(), r["upper"].as_f64().unwrap());
    assert!((up - PI).abs() <= 1e-10 * PI);
    assert!(lo >= 0.95 * PI && lo <= up);
}

#[test]
fn hypothesis_violation_is_a_precondition() {
    let o = hilbert(&["validate", "--command", "norm", "--measure", "lebesgue", "--p", "2", "--alpha", "1"]);
    assert_eq!(code(&o), 3);
    let line: Value = serde_json::from_slice(o.stdout.split(|&b| b == b'\n').next().unwrap()).unwrap();
    assert_eq!(line["kind"], "precondition");
    assert_eq!(line["module"], "seqspace");
    assert_eq!(hilbert(&["norm", "--measure", "lebesgue", "--p", "2", "--alpha", "1"]).status.code(), Some(3));
}

#[test]
fn negative_atom_mass_is_reported() {
    let o = hilbert(&["validate", "--command", "apply", "--measure", "dirac:0.5:-1", "--p", "2", "--alpha", "0"]);
    assert_eq!(code(&o), 3);
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(text.contains("\"module\":\"measures\"") && text.contains("mass"), "{text}");
}

#[test]
fn tau_outside_range_is_a_config_error() {
    let o = hilbert(&["sharpness", "--measure", "lebesgue", "--p", "2", "--alpha", "0", "--tau-list", "1.5"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("tau_list"));
}

#[test]
fn unknown_config_field_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    fs::write(
        &path,
        r#"{"command":"norm","measure":"lebesgue","weights":{"p":2,"alpha":0},"params":{"bogus":1}}"#,
    )
    .unwrap();
    assert_eq!(code(&hilbert(&["run", "--config", path.to_str().unwrap()])), 2);
    // A parameter that the command does not read is also a config error.
    let o = hilbert(&["validate", "--command", "norm", "--measure", "lebesgue", "--p", "2", "--alpha", "0", "--tau-list", "0.1"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stdout).contains("tau_list"));
}

#[test]
fn precision_cap_and_nonconvergence_codes() {
    let o = hilbert(&[
        "sharpness", "--measure", "monomial:1", "--p", "2", "--alpha", "0", "--eps-list", "1e-10", "--tau-list", "0.1",
        "--m", "1000", "--m-out", "100",
    ]);
    assert_eq!(code(&o), 4, "{}", String::from_utf8_lossy(&o.stderr));
    let o = hilbert(&[
        "norm", "--measure", "lebesgue", "--p", "2", "--alpha", "0", "--power-sizes", "64", "--power-iters", "1",
        "--eps-list", "0.2",
    ]);
    assert_eq!(code(&o), 5);
    assert!(String::from_utf8_lossy(&o.stderr).contains("interval"));
}

#[test]
fn reports_are_deterministic() {
    let args = ["divergence", "--measure", "lebesgue", "--p", "2", "--alpha", "0", "--beta", "0.5", "--steps", "3", "--seed", "7"];
    let (a, b) = (hilbert(&args), hilbert(&args));
    assert_eq!(code(&a), 0);
    assert_eq!(strip_runtime(json(&a)), strip_runtime(json(&b)));
    let (a, b) = (hilbert(&["identities", "--seed", "11"]), hilbert(&["identities", "--seed", "11"]));
    assert_eq!(strip_runtime(json(&a)), strip_runtime(json(&b)));
}

#[test]
fn out_file_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.csv");
    let o = hilbert(&[
        "norm", "--measure", "lebesgue", "--p", "2", "--alpha", "0", "--eps-list", "0.2,0.1", "--format", "csv", "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    assert!(o.stdout.is_empty());
    let text = fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("parameter,estimate,slack,cumulative_max"));
    assert_eq!(lines.count(), 2);
    let leftovers: Vec<_> = fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
    assert_eq!(leftovers.len(), 1, "temporary files left behind: {leftovers:?}");
}

#[test]
fn toml_config_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.toml");
    fs::write(
        &path,
        "command = \"moments\"\nmeasure = \"one-minus-t:2\"\nseed = 3\n[weights]\np = 2.0\nalpha = 0.0\n[params]\nn_max = 200\n",
    )
    .unwrap();
    let o = hilbert(&["run", "--config", path.to_str().unwrap(), "--n-max", "50"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(json(&o)["trace"].as_array().unwrap().len(), 50);
    let o = hilbert(&["norm", "--config", path.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
}

fn write_batch(dir: &Path) {
    for (i, m) in ["lebesgue", "dirac:0.5", "one-minus-t:1"].iter().enumerate() {
        fs::write(
            dir.join(format!("job{i}.json")),
            format!(r#"{{"command":"moments","measure":"{m}","weights":{{"p":2,"alpha":0}},"params":{{"n_max":100}}}}"#),
        )
        .unwrap();
    }
    fs::write(dir.join("cfg.toml"), "command = \"identities\"\n").unwrap();
}

#[test]
fn batch_runs_every_config() {
    for workers in ["1", "3"] {
        let dir = tempfile::tempdir().unwrap();
        write_batch(dir.path());
        let o = hilbert(&["batch", dir.path().to_str().unwrap(), "--workers", workers]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        for stem in ["job0", "job1", "job2"] {
            let v: Value = serde_json::from_str(&fs::read_to_string(dir.path().join(format!("{stem}.report.json"))).unwrap()).unwrap();
            assert_eq!(v["experiment"], "moments");
        }
        assert!(dir.path().join("cfg.report.json").exists());
    }
    let dir = tempfile::tempdir().unwrap();
    write_batch(dir.path());
    fs::write(dir.path().join("broken.json"), "{").unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_hilbert"))
        .args(["batch", dir.path().to_str().unwrap()])
        .env("HILBERT_WORKERS", "2")
        .output()
        .unwrap();
    assert_eq!(code(&o), 2);
    assert!(dir.path().join("job1.report.json").exists());
}

#[test]
fn validate_reports_every_problem() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("many.json");
    fs::write(
        &path,
        r#"{"command":"sharpness","measure":"dirac:2","weights":{"p":0.5,"alpha":0},"params":{"len":5}}"#,
    )
    .unwrap();
    let o = hilbert(&["validate", "--config", path.to_str().unwrap()]);
    let lines: Vec<Value> = String::from_utf8_lossy(&o.stdout).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert!(lines.len() >= 3, "{lines:?}");
    let fields: Vec<&str> = lines.iter().map(|l| l["field"].as_str().unwrap()).collect();
    assert!(fields.contains(&"measure") && fields.contains(&"weights") && fields.contains(&"params.len"), "{fields:?}");
    assert_eq!(code(&o), 2);
}
