use std::path::Path;
use std::process::{Command, Output};

use serde_json::{json, Value};
use tempfile::TempDir;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_prismstrat"));
    c.env_remove("PRISMSTRAT_JOBS");
    c
}

fn write(dir: &TempDir, name: &str, v: &Value) -> std::path::PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, serde_json::to_string(v).unwrap()).unwrap();
    p
}

fn run(args: &[&str], spec: &Path) -> (Output, Value) {
    let out = bin().args(args).arg(spec).output().unwrap();
    let v: Value = serde_json::from_slice(&out.stdout)
        .unwrap_or_else(|e| panic!("stdout is not JSON ({e}): {}", String::from_utf8_lossy(&out.stdout)));
    (out, v)
}

fn grid(n: usize) -> Value {
    let seeds: Vec<Value> = (0..n as i64)
        .map(|i| json!([format!("{}/{}", i % 5 - 2, i % 3 + 1), format!("{}", (i * 7) % 11 - 5)]))
        .collect();
    json!({
        "base": {"p": 3, "E_coeffs": [-3, 1], "trunc": {"t": 3, "x": 6}},
        "seed_grid": seeds,
        "commands": ["cocycle", "conjecture"],
    })
}

#[test]
fn zero_seeds_give_zero_cocycle_residual() {
    let dir = TempDir::new().unwrap();
    let spec = write(&dir, "s.json", &json!({"p": 3, "E_coeffs": [-3, 1], "trunc": {"t": 4, "x": 8}}));
    let (out, v) = run(&["cocycle"], &spec);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(v["report"]["verdict"], "ZERO_RESIDUAL");
}

#[test]
fn conjecture_vanishes_through_k2() {
    let dir = TempDir::new().unwrap();
    let spec = write(
        &dir,
        "s.json",
        &json!({"p": 3, "E_coeffs": [-3, 0, 1], "seeds": [["1/2"], [[["2/3", "1"]]]],
                "trunc": {"t": 4, "x": 8}, "options": {"k_max": 2}}),
    );
    let (out, v) = run(&["conjecture", "--spec"], &spec);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(v["report"]["residuals"], json!([0, 0, 0]));
}

#[test]
fn sweep_of_twenty_grids() {
    let dir = TempDir::new().unwrap();
    let spec = write(&dir, "g.json", &grid(20));
    let (out, v) = run(&["sweep"], &spec);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(v["summary"]["total"], 20);
    assert_eq!(v["instances"].as_object().unwrap().len(), 20);
    assert_eq!(v["summary"]["verdicts"]["cocycle"]["ok"], 20);
    assert_eq!(v["summary"]["potential_counterexamples"], json!([]));
    for inst in v["instances"].as_object().unwrap().values() {
        assert_eq!(inst["verdicts"]["cocycle"], "ZERO_RESIDUAL");
    }
}

#[test]
fn sweep_independent_of_jobs_and_deterministic() {
    let dir = TempDir::new().unwrap();
    let spec = write(&dir, "g.json", &grid(8));
    let a = bin().args(["sweep", "--jobs", "1"]).arg(&spec).output().unwrap();
    let b = bin().args(["sweep"]).arg(&spec).env("PRISMSTRAT_JOBS", "3").output().unwrap();
    let c = bin().args(["sweep", "--jobs", "1"]).arg(&spec).output().unwrap();
    assert!(a.status.success() && b.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout, c.stdout);
}

#[test]
fn out_flag_writes_identical_report() {
    let dir = TempDir::new().unwrap();
    let spec = write(
        &dir,
        "s.json",
        &json!({"p": 3, "E_coeffs": [-3, 0, 1], "seeds": ["-1", "2/7"], "trunc": {"t": 3, "x": 4}}),
    );
    let out_path = dir.path().join("r.json");
    let st = bin().args(["gen", "--spec"]).arg(&spec).arg("--out").arg(&out_path).status().unwrap();
    assert!(st.success());
    let stdout = bin().arg("gen").arg(&spec).output().unwrap().stdout;
    assert_eq!(std::fs::read(&out_path).unwrap(), stdout);
}

#[test]
fn overrides_change_truncation() {
    let dir = TempDir::new().unwrap();
    let spec = write(&dir, "s.json", &json!({"p": 3, "E_coeffs": [-3, 1], "trunc": {"t": 4, "x": 8}}));
    let (_, v) = run(&["cocycle", "--trunc-t", "2", "--trunc-x", "3"], &spec);
    assert_eq!(v["report"]["trunc"], json!({"t": 2, "x": 3}));
}

#[test]
fn validate_reports_each_violation() {
    let dir = TempDir::new().unwrap();
    let cases = [
        (json!({"p": 3, "E_coeffs": [9, 1], "trunc": {"t": 3, "x": 4}}), "NotEisenstein", 2),
        (
            json!({"p": 3, "E_coeffs": [-3, 1], "seeds": [[["1", "2"]]], "trunc": {"t": 3, "x": 4}}),
            "SeedShapeMismatch",
            2,
        ),
        (
            json!({"p": 3, "E_coeffs": [-3, 1], "l": 2, "seeds": [[["1", 0], [0, 0]], [[0, 1], [0, 0]]],
                   "trunc": {"t": 3, "x": 4}}),
            "NonCommutingSeeds",
            0,
        ),
    ];
    for (i, (spec, kind, code)) in cases.iter().enumerate() {
        let p = write(&dir, &format!("v{i}.json"), spec);
        let (out, v) = run(&["validate"], &p);
        assert_eq!(out.status.code(), Some(*code), "{kind}");
        let kinds: Vec<&str> = v["diagnostics"].as_array().unwrap().iter().map(|d| d["kind"].as_str().unwrap()).collect();
        assert!(kinds.contains(kind), "{kinds:?}");
    }
}

#[test]
fn non_commuting_seeds_block_closed_form() {
    let dir = TempDir::new().unwrap();
    let p = write(
        &dir,
        "s.json",
        &json!({"p": 3, "E_coeffs": [-3, 1], "l": 2, "seeds": [[["1", 0], [0, 0]], [[0, 1], [0, 0]]],
               "trunc": {"t": 3, "x": 4}}),
    );
    let (out, v) = run(&["closed-form"], &p);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(v["error"]["kind"], "NonCommutingSeeds");
    // the cocycle command still runs on the same spec
    let (out, v) = run(&["cocycle"], &p);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(v["report"]["seeds_commute"], false);
    assert_eq!(v["report"]["verdict"], "ZERO_RESIDUAL");
}

#[test]
fn exit_codes_and_error_objects() {
    let dir = TempDir::new().unwrap();
    let missing = dir.path().join("missing.json");
    let (out, v) = run(&["h0"], &missing);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(v["error"]["kind"], "Read");

    let broken = dir.path().join("broken.json");
    std::fs::write(&broken, "{").unwrap();
    let (out, v) = run(&["h0"], &broken);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(v["error"]["kind"], "Parse");

    let unsettled = write(
        &dir,
        "n.json",
        &json!({"p": 3, "E_coeffs": [-3, 1], "seeds": ["1"], "trunc": {"t": 3, "x": 4}, "options": {"n_phi_max": 1}}),
    );
    let (out, v) = run(&["sen"], &unsettled);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(v["error"]["kind"], "ProductNotSettled");
}

#[test]
fn remaining_commands_produce_reports() {
    let dir = TempDir::new().unwrap();
    let p = write(
        &dir,
        "s.json",
        &json!({"p": 3, "E_coeffs": [-3, 0, 1], "seeds": ["1/3", "2/5"], "trunc": {"t": 4, "x": 6}}),
    );
    let (out, v) = run(&["closed-form"], &p);
    assert!(out.status.success());
    assert_eq!(v["report"]["verify"]["all_zero"], true);
    let (out, v) = run(&["h0"], &p);
    assert!(out.status.success());
    assert!(v["report"]["dim"].as_u64().unwrap() <= v["report"]["q"].as_u64().unwrap());
    let (out, v) = run(&["sen"], &p);
    assert!(out.status.success());
    assert_eq!(v["report"]["sen"]["leibniz"]["holds"], true);
}
