use std::path::Path;
use std::process::{Command, Output};

use momentray_core::cli::output::RunManifest;
use sha2::{Digest, Sha256};

fn momentray(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_momentray"))
        .args(args)
        .env_remove("MOMENTRAY_WORKERS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

/// Data lines of a CSV output: header row first, comment block dropped.
fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn write(dir: &Path, name: &str, content: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, content).unwrap();
    p.display().to_string()
}

#[test]
fn exponents_for_d3() {
    let o = momentray(&["exponents", "--dim", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("\np,3/2\n") && out.contains("\nq,2\n"), "{out}");
    assert!(out.contains("\"(2/3, 1/2)\""), "{out}");
    assert!(stderr(&o).contains("p = 3/2, q = 2"));
}

#[test]
fn jacobian_ratios_are_constant() {
    let o = momentray(&["jacobian", "--dim", "4", "--samples", "200", "--seed", "7"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("# verdict: PASS"));
    let rows = csv_rows(&out);
    assert_eq!(rows[0], ["kind", "sample", "ratio"]);
    assert_eq!(rows.len(), 1 + 400);
    for kind in ["phi", "psi"] {
        let ratios: Vec<f64> = rows[1..].iter().filter(|r| r[0] == kind).map(|r| r[2].parse().unwrap()).collect();
        let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
        assert!((mean.abs() - 1.0).abs() < 1e-6);
        let dispersion = ratios.iter().map(|r| (r - mean).abs()).fold(0.0, f64::max) / mean.abs();
        assert!(dispersion < 1e-6, "{kind}: {dispersion}");
    }
}

#[test]
fn empty_config_lists_missing_fields() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "empty.json", "{}");
    let o = momentray(&["region", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.contains("missing required fields: dim, p_inv, q_inv"), "{err}");
}

#[test]
fn malformed_input_is_a_configuration_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "bad.json", r#"{"dimm": 2}"#);
    assert_eq!(momentray(&["exponents", "--config", &cfg]).status.code(), Some(2));
    assert_eq!(momentray(&["exponents", "--dim", "1"]).status.code(), Some(2));
    assert_eq!(momentray(&["rwt", "--entry", "no-such-entry"]).status.code(), Some(2));
    assert_eq!(momentray(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.json", r#"{"dim": 2, "format": "json"}"#);
    let o = momentray(&["exponents", "--config", &cfg, "--dim", "3"]);
    let doc: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(doc["result"]["p"], "3/2");
    assert_eq!(doc["header"]["operation"], "exponents");
}

#[test]
fn failing_check_exits_with_one() {
    // A half-unit midpoint rule is far too coarse for the duality tolerance.
    let o = momentray(&["duality", "--dim", "2", "--pairs", "10", "--step", "0.5"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("# verdict: FAIL"));
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "far.json",
        r#"{"e": {"dim": 2, "boxes": [{"lo": [0, 0], "hi": [1, 1]}]},
            "f": {"dim": 2, "boxes": [{"lo": [10, 10], "hi": [11, 11]}]}}"#,
    );
    let o = momentray(&["rwt", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("bilinear form vanishes"));
}

#[test]
fn csv_header_block_traces_the_run() {
    let o = momentray(&["scaling", "--dim", "3", "--n-list", "16,32,64,128"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    let header: Vec<&str> = out.lines().take_while(|l| l.starts_with('#')).collect();
    for want in ["# operation: scaling", "# param dim: 3", "# param n_list: 16 32 64 128", "# param r: 1.5", "# seed: 7"] {
        assert!(header.contains(&want), "missing {want:?} in {header:?}");
    }
    assert!(header.iter().any(|l| l.starts_with("# config_sha256: ")));
    let rows = csv_rows(&out);
    assert_eq!(rows[0], ["n", "norm_f", "norm_xf", "norm_xf_lorentz"]);
    assert_eq!(rows.len(), 5);
    assert!(!out.contains('\r'));
}

#[test]
fn necessity_flips_across_the_critical_exponent() {
    for (r, want) in [("1.35", "unbounded"), ("1.65", "bounded")] {
        let o = momentray(&["necessity", "--dim", "3", "--r", r]);
        assert_eq!(o.status.code(), Some(0));
        let rows = csv_rows(&stdout(&o));
        assert_eq!(rows[1][6], want);
    }
}

#[test]
fn refine_emits_a_tower_report() {
    let o = momentray(&["refine", "--dim", "2"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let report = &doc["result"][0]["report"];
    assert_eq!(report["levels"].as_array().unwrap().len(), 2);
    assert_eq!(report["kind"], "phi");
    assert!(report["integral"].as_f64().unwrap() > 0.0);
    assert_eq!(report["structure"]["passed"], report["structure"]["sampled"]);
}

fn run_to_file(args: &[&str], path: &Path, workers: &str) -> String {
    let p = path.display().to_string();
    let mut full: Vec<&str> = args.to_vec();
    full.extend(["--output", &p, "--workers", workers]);
    let o = momentray(&full);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    std::fs::read_to_string(path).unwrap()
}

#[test]
fn outputs_do_not_depend_on_workers_or_path() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["lemma2", "--entry", "box-3-03", "--entry", "random-2-02", "--format", "json"];
    let a = run_to_file(&args, &dir.path().join("a.json"), "1");
    let b = run_to_file(&args, &dir.path().join("b.json"), "4");
    assert_eq!(a, b);
    let manifest: RunManifest =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("b.json.manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest.workers, 4);
    assert_eq!(manifest.operation, "lemma2");
    assert_eq!(manifest.outputs[0].sha256, hex::encode(Sha256::digest(b.as_bytes())));
}

#[test]
fn workers_from_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_momentray"))
        .args(["exponents", "--dim", "2"])
        .env("MOMENTRAY_WORKERS", "zero")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.csv");
    let o = Command::new(env!("CARGO_BIN_EXE_momentray"))
        .args(["exponents", "--dim", "2", "--output", &out.display().to_string()])
        .env("MOMENTRAY_WORKERS", "3")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    let manifest: RunManifest =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("x.csv.manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest.workers, 3);
}

#[test]
fn acceptance_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let a = run_to_file(&["acceptance", "--seed", "11"], &dir.path().join("a.csv"), "1");
    let b = run_to_file(&["acceptance", "--seed", "11"], &dir.path().join("b.csv"), "3");
    assert_eq!(a, b);
    let rows = csv_rows(&a);
    assert_eq!(rows.len(), 10);
}
