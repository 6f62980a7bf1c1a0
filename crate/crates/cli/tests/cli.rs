use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_skbessel")).args(args).output().expect("spawn skbessel")
}

fn json(args: &[&str]) -> Value {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("json output")
}

#[test]
fn factor_steinberg_jl() {
    let v = json(&["factor", "--p", "3", "--case", "U-i", "--tau", "steinberg", "--member", "jl"]);
    assert_eq!(v["schema"], "skbessel/1");
    assert_eq!(v["exists"], true);
    assert_eq!(v["N_pi"], 2);
    assert_eq!(v["M_pi"], 1);
    assert_eq!(v["eps_pi"], "+");
    assert_eq!(v["strict_space"], "B_{1,+}^{+}");
}

#[test]
fn factor_odd_conductor_in_case_u() {
    let v = json(&["factor", "--p", "3", "--case", "U-i", "--tau", "sc", "--n-tau", "3", "--member", "sk"]);
    assert_eq!(v["exists"], false);
}

#[test]
fn factor_not_determined() {
    let v = json(&["factor", "--p", "3", "--case", "R-i", "--tau", "sc", "--n-tau", "2", "--member", "sk"]);
    assert!(v["exists"].is_null());
    assert_eq!(v["status"], "not_determined");
}

#[test]
fn euler_trivial_input() {
    let v = json(&["euler", "--d", "1", "--n-max", "10", "--default-satake", "1"]);
    let cs = v["coefficients"].as_array().unwrap();
    assert_eq!(cs.len(), 10);
    assert_eq!(cs[0]["c_n"], "1");
}

#[test]
fn euler_csv() {
    let out = run(&["euler", "--d", "1", "--n-max", "6", "--default-satake", "1", "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "n,c_n");
    assert_eq!(lines[1], "1,1");
    assert_eq!(lines.len(), 7);
}

#[test]
fn euler_missing_prime_is_domain_error() {
    let out = run(&["euler", "--d", "1", "--n-max", "10"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("no local data"));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(run(&["factor", "--bogus"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn cosets_and_hecke() {
    let v = json(&["cosets", "--p", "3", "--case", "R-i", "--m", "1", "--samples", "20"]);
    assert_eq!(v["cosets"]["count"], 4);
    assert_eq!(v["expected"], 4);
    let h = json(&["cosets", "--p", "3", "--case", "U-i", "--m", "0", "--hecke", "+"]);
    assert_eq!(h["count"], 27);
}

#[test]
fn group_verify_small() {
    let v = json(&["group", "verify", "--p", "3", "--case", "U-i", "--m", "1", "--flavor", "complete", "--samples", "30"]);
    assert_eq!(v["passed"], true);
}

#[test]
fn global_root_files() {
    let dir = std::env::temp_dir().join(format!("skbessel-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let tau = dir.join("tau.json");
    std::fs::write(&tau, r#"{"primes": {"5": {"kind": "steinberg"}}}"#).unwrap();
    let dd = dir.join("dd.json");
    std::fs::write(&dd, r#"{"5": {"eps_product": "-", "chi_minus_one": "-"}}"#).unwrap();
    let args = ["global-root", "--tau-file", tau.to_str().unwrap(), "--d", "1", "--s", "5", "--kappa", "1"];
    let v = json(&args);
    assert_eq!(v["global_root_number"], "+");
    let mut with_dd = args.to_vec();
    with_dd.extend(["--dichotomy", dd.to_str().unwrap()]);
    assert_eq!(json(&with_dd)["matches"], true);
    let bad = run(&["global-root", "--tau-file", tau.to_str().unwrap(), "--d", "1", "--kappa", "1"]);
    assert_eq!(bad.status.code(), Some(1));
    std::fs::remove_dir_all(&dir).ok();
}
