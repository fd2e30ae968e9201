use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bernstein")).args(args).output().expect("binary runs")
}

fn run_json(command: &str, file: &str, extra: &[&str]) -> (Value, i32) {
    let input = data(file);
    let mut args = vec![command, "--input", input.to_str().unwrap()];
    args.extend_from_slice(extra);
    let out = run(&args);
    let code = out.status.code().unwrap();
    let v = serde_json::from_slice(&out.stdout).unwrap_or(Value::Null);
    (v, code)
}

#[test]
fn stab_on_sl3_barycentric() {
    let (v, code) = run_json("stab", "sl3_barycentric.json", &[]);
    assert_eq!(code, 0);
    assert_eq!(v["w_theta_order"], 3);
    assert_eq!(v["nonsingular"], true);
    assert_eq!(v["gamma_order"], 3);
    assert_eq!(v["w_theta_circ_order"], 1);
    assert_eq!(v["alcove_stabilizer_order"], 3);
}

#[test]
fn oracle_on_legendre() {
    let (v, code) = run_json("oracle", "sl2_legendre.json", &[]);
    assert_eq!(code, 0);
    assert_eq!(v["q_parameter"], "1");
    assert_eq!(v["dimension"], 2);
    assert_eq!(v["kind"], "SL2");
}

#[test]
fn oracle_and_qparams_on_pgl2_trivial() {
    let (v, _) = run_json("oracle", "pgl2_trivial.json", &[]);
    assert_eq!(v["q_parameter"], "5");
    let (v, code) = run_json("qparams", "pgl2_trivial.json", &[]);
    assert_eq!(code, 0);
    assert_eq!(v["shape"], "affine Hecke algebra");
    let gens = v["hecke_generators"].as_array().unwrap();
    assert_eq!(gens.len(), 2);
    assert!(gens.iter().all(|g| g["q"] == "5"));
}

#[test]
fn legendre_block_is_a_twisted_group_algebra() {
    let (v, code) = run_json("qparams", "sl2_legendre.json", &[]);
    assert_eq!(code, 0);
    assert_eq!(v["shape"], "twisted group algebra");
    assert_eq!(v["gamma_order"], 2);
    assert!(v["hecke_generators"].as_array().unwrap().is_empty());
}

#[test]
fn hecke_with_omega_cocycle() {
    let (v, code) = run_json("hecke", "pgl2_trivial.json", &[]);
    assert_eq!(code, 0);
    assert_eq!(v["relations_hold"], true);
    assert_eq!(v["twisted"], true);
}

#[test]
fn cocycle_baer_sum_with_inverse_splits() {
    let (v, code) = run_json("cocycle", "pgl2_trivial.json", &["--equivariant"]);
    assert_eq!(code, 0);
    assert_eq!(v["baer_sum_with_inverse_splits"], true);
    // over ℚ/ℤ every cocycle on a cyclic group splits
    assert_eq!(v["splits"], true);
    assert_eq!(v["exhaustive_splits"], true);
    assert_eq!(v["equivariant"]["compatible"], true);
}

#[test]
fn validate_reports_diagnostics() {
    let (v, code) = run_json("validate", "sl2_legendre.json", &[]);
    assert_eq!(code, 0);
    assert_eq!(v["clean"], true);

    let (v, code) = run_json("validate", "bad_theta.json", &[]);
    assert_eq!(code, 1);
    let d = v["diagnostics"].as_array().unwrap();
    assert!(d.iter().any(|x| x.as_str().unwrap().contains("(q*F0 - 1)*theta != 0")));

    let (v, code) = run_json("validate", "bad_cartan.json", &[]);
    assert_eq!(code, 1);
    assert!(v["diagnostics"][0].as_str().unwrap().contains("Cartan"));
}

#[test]
fn exit_codes() {
    let (_, code) = run_json("stab", "bad_theta.json", &[]);
    assert_eq!(code, 1);
    let (_, code) = run_json("stab", "sl3_barycentric.json", &["--max-group-order", "3"]);
    assert_eq!(code, 2);
    let (_, code) = run_json("oracle", "sl2_legendre.json", &["--max-group-order", "10"]);
    assert_eq!(code, 2);
    assert_eq!(run(&["stab"]).status.code(), Some(1));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));

    let dir = tempfile::tempdir().unwrap();
    let broken = dir.path().join("broken.json");
    std::fs::write(&broken, "{\"rank\": 1,").unwrap();
    assert_eq!(run(&["stab", "--input", broken.to_str().unwrap()]).status.code(), Some(1));
    let unknown = dir.path().join("unknown.json");
    let mut v: Value = serde_json::from_str(&std::fs::read_to_string(data("sl2_legendre.json")).unwrap()).unwrap();
    v["colour"] = Value::from("blue");
    std::fs::write(&unknown, v.to_string()).unwrap();
    assert_eq!(run(&["stab", "--input", unknown.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn output_is_deterministic_and_round_trips() {
    for command in ["stab", "qparams", "hecke", "oracle", "cocycle"] {
        let input = data("sl2_legendre.json");
        let args = [command, "--input", input.to_str().unwrap()];
        let a = run(&args).stdout;
        let b = run(&args).stdout;
        assert_eq!(a, b, "{command}");
        let v: Value = serde_json::from_slice(&a).unwrap();
        let mut again = serde_json::to_string_pretty(&v).unwrap();
        again.push('\n');
        assert_eq!(again.as_bytes(), &a[..], "{command}");
    }
}

#[test]
fn out_flag_and_text_format() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.txt");
    let input = data("sl2_legendre.json");
    let out = run(&["oracle", "--input", input.to_str().unwrap(), "--format", "text", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(path).unwrap();
    assert!(text.lines().any(|l| l == "q_parameter = 1"));
}
