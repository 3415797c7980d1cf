use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn exclusia(args: &[&str], out_dir: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_exclusia"));
    cmd.args(args).env_remove("EXCLUSIA_OUT_DIR");
    if let Some(d) = out_dir {
        cmd.env("EXCLUSIA_OUT_DIR", d);
    }
    cmd.output().expect("binary runs")
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("stdout is JSON")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn close(v: &Value, x: f64, tol: f64) -> bool {
    (v.as_f64().unwrap() - x).abs() < tol
}

#[test]
fn ssep_two_sites() {
    let o = exclusia(&["ssep", "--alpha", "1", "--beta", "1", "--gamma", "0", "--delta", "0", "--L", "2"], None);
    assert_eq!(code(&o), 0);
    let r = json(&o);
    assert_eq!(r["schema"], 1);
    assert!(close(&r["result"]["current"], 1.0 / 3.0, 1e-15));
    assert!(close(&r["result"]["densities"][0], 2.0 / 3.0, 1e-15));
    assert!(close(&r["result"]["densities"][1], 1.0 / 3.0, 1e-15));
}

#[test]
fn exact_and_mpa_agree_on_tasep() {
    let o = exclusia(
        &["compare", "--methods", "exact,mpa", "--q", "0", "--alpha", "1", "--beta", "1", "--L", "3", "--tol", "1e-10"],
        None,
    );
    assert_eq!(code(&o), 0);
    let r = json(&o);
    assert!(r["comparison"]["max_abs_deviation"].as_f64().unwrap() < 1e-8);
    assert_eq!(r["comparison"]["pairs"].as_array().unwrap().len(), 1);
}

#[test]
fn dolan_grady_at_spin_two() {
    let o = exclusia(
        &[
            "verify-algebra",
            "--kind",
            "DG38",
            "--j",
            "2",
            "--alpha",
            "1",
            "--beta",
            "1",
            "--gamma",
            "1",
            "--delta",
            "1",
        ],
        None,
    );
    assert_eq!(code(&o), 0);
    let r = json(&o);
    assert!(r["max_residual"].as_f64().unwrap() < 1e-12);
    assert_eq!(r["pass"], true);
}

#[test]
fn residual_failure_still_writes_the_report() {
    let args = [
        "verify-algebra",
        "--kind",
        "DG38",
        "--j",
        "1",
        "--alpha",
        "0.7",
        "--beta",
        "1.3",
        "--gamma",
        "0.4",
        "--delta",
        "0.9",
        "--constants",
        "printed",
    ];
    let o = exclusia(&args, None);
    assert_eq!(code(&o), 4);
    assert_eq!(json(&o)["pass"], false);
}

#[test]
fn charges_commute() {
    let o = exclusia(
        &["charges", "--alpha", "0.7", "--beta", "1.3", "--gamma", "0.4", "--delta", "0.9", "--j", "3", "--order", "4"],
        None,
    );
    assert_eq!(code(&o), 0);
    let r = json(&o);
    assert!(r["max_commutator"].as_f64().unwrap() < 1e-10);
    assert_eq!(r["commutators"].as_array().unwrap().len(), 10);
}

#[test]
fn kmc_reports_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "kmc",
        "--alpha",
        "1",
        "--beta",
        "0.6",
        "--q",
        "0.3",
        "--L",
        "4",
        "--t-measure",
        "100",
        "--replicas",
        "6",
        "--seed",
        "11",
    ];
    let mut runs = Vec::new();
    for name in ["a.json", "b.json"] {
        let mut a = args.to_vec();
        a.extend(["--out", name]);
        assert_eq!(code(&exclusia(&a, Some(dir.path()))), 0);
        runs.push(std::fs::read(dir.path().join(name)).unwrap());
    }
    assert_eq!(runs[0], runs[1]);
    let again = exclusia(&[&args[..11], &["--seed", "12"]].concat(), None);
    assert_ne!(again.stdout, runs[0]);
}

#[test]
fn out_dir_names_the_file_after_the_subcommand() {
    let dir = tempfile::tempdir().unwrap();
    let o = exclusia(&["exact", "--alpha", "1", "--beta", "1", "--L", "3", "--format", "csv"], Some(dir.path()));
    assert_eq!(code(&o), 0);
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(dir.path().join("exact.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("site,density"));
    assert_eq!(lines.count(), 3);
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "alpha = 1.0\nbeta = 1.0\nL = 2\nq = 1.0\n").unwrap();
    let c = cfg.to_str().unwrap();
    let r = json(&exclusia(&["ssep", "--config", c], None));
    assert_eq!(r["params"]["L"], 2);
    let r = json(&exclusia(&["ssep", "--config", c, "--L", "5"], None));
    assert_eq!(r["params"]["L"], 5);
    assert!(close(&r["result"]["current"], 1.0 / 6.0, 1e-15));

    std::fs::write(&cfg, "alpha = 1.0\nspeed = 3\n").unwrap();
    assert_eq!(code(&exclusia(&["ssep", "--config", c], None)), 2);
}

#[test]
fn exit_codes() {
    let cases: &[(&[&str], i32)] = &[
        (&["exact", "--alpha", "1", "--L", "3"], 2),
        (&["exact", "--alpha", "1", "--beta", "1", "--L", "3", "--bogus"], 2),
        (&["exact", "--alpha", "-1", "--beta", "1", "--L", "3"], 2),
        (&["exact", "--alpha", "1", "--beta", "1", "--L", "40"], 2),
        (&["verify-algebra", "--kind", "nope"], 2),
        (&["verify-algebra", "--kind", "AW13", "--form", "printed"], 2),
        (&["verify-algebra", "--kind", "DG38", "--q", "0.5"], 2),
        (&["verify-algebra", "--kind", "TASEP85", "--constants", "derived"], 2),
        (&["verify-algebra", "--kind", "DG38", "--format", "csv"], 2),
        (&["verify-algebra", "--kind", "bulkSSEP", "--form", "printed"], 4),
        (&["charges", "--alpha", "1", "--beta", "1", "--q", "0.5"], 2),
        (&["compare", "--methods", "exact", "--alpha", "1", "--beta", "1", "--L", "3"], 2),
        (&["compare", "--methods", "exact,fft", "--alpha", "1", "--beta", "1", "--L", "3"], 2),
        (&["mpa", "--evaluator", "truncated", "--alpha", "1", "--beta", "1", "--L", "3"], 2),
        (&["exact", "--alpha", "1", "--beta", "1", "--L", "3", "--out", "/proc/none/r.json"], 5),
    ];
    for (args, want) in cases {
        let o = exclusia(args, None);
        assert_eq!(code(&o), *want, "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn every_method_on_one_chain() {
    let o = exclusia(
        &[
            "compare",
            "--methods",
            "exact,ssep,mpa,kmc",
            "--alpha",
            "0.8",
            "--beta",
            "0.5",
            "--gamma",
            "0.2",
            "--delta",
            "0.1",
            "--L",
            "4",
            "--t-measure",
            "400",
            "--replicas",
            "8",
            "--seed",
            "3",
        ],
        None,
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r = json(&o);
    let pairs = r["comparison"]["pairs"].as_array().unwrap();
    assert_eq!(pairs.len(), 6);
    for p in pairs {
        let exact_only = p["methods"].as_array().unwrap().iter().all(|m| m != "kmc");
        let limit = if exact_only { 1e-10 } else { 0.1 };
        assert!(p["density_abs"].as_f64().unwrap() < limit, "{p}");
    }
}
