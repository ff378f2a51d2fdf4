//! End-to-end tests that run the strata binary and check bytes and exit codes.

use std::io::Write;
use std::process::{Command, Output, Stdio};

fn strata(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_strata"))
        .args(args)
        .env_remove("STRATA_MAX_N")
        .output()
        .expect("binary runs")
}

fn strata_stdin(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_strata"))
        .args(args)
        .env_remove("STRATA_MAX_N")
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary spawns");
    child
        .stdin
        .as_mut()
        .expect("stdin piped")
        .write_all(input.as_bytes())
        .expect("stdin writable");
    child.wait_with_output().expect("binary runs")
}

fn stdout_of(args: &[&str]) -> String {
    let out = strata(args);
    assert!(out.status.success(), "{:?} failed: {}", args, String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).expect("utf8 output")
}

#[test]
fn slide_psi_three_terms() {
    let text = stdout_of(&["slide", "--flavor", "psi", "--k", "1,0,2"]);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 4);
    assert!(lines.iter().all(|l| l.starts_with("1 * ") || l.starts_with('#')));
    assert_eq!(lines[3], "# 3 strata, total multiplicity 3");
}

#[test]
fn slide_psi_json_is_three_term_sum() {
    let text = stdout_of(&["slide", "--flavor", "psi", "--k", "1,0,2", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&text).expect("valid json");
    assert_eq!(v["n"], 3);
    assert_eq!(v["terms"].as_array().expect("array of terms").len(), 3);
}

#[test]
fn slide_omega_can_be_empty_with_success() {
    let out = strata(&["slide", "--flavor", "omega", "--k", "2,1,0"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.trim(), "# 0 strata, total multiplicity 0");
}

#[test]
fn bad_composition_is_usage_error() {
    let out = strata(&["slide", "--flavor", "psi", "--k", "2,1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!String::from_utf8_lossy(&out.stderr).is_empty());
}

#[test]
fn unknown_flag_is_usage_error() {
    let out = strata(&["slide", "--nope", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bound_exceeded_is_exit_three() {
    let out = strata(&["slide", "--flavor", "psi", "--k", "0,0,0,0,0,0,0,8"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bound"));
}

#[test]
fn max_n_flag_raises_the_bound() {
    let out = strata(&["--max-n", "8", "patterns", "avoiders", "--n", "8"]);
    assert!(out.status.success());
    assert_eq!(strata(&["patterns", "avoiders", "--n", "8"]).status.code(), Some(3));
}

#[test]
fn tour_finds_six_winners() {
    let text = stdout_of(&["tour", "--k", "0,0,2,2"]);
    let winners = text.lines().filter(|l| !l.starts_with('#')).count();
    assert_eq!(winners, 6);
}

#[test]
fn tour_is_equinumerous_with_slide_omega() {
    let a = stdout_of(&["tour", "--k", "0,0,2,2", "--format", "csv"]);
    let b = stdout_of(&["slide", "--flavor", "omega", "--k", "0,0,2,2", "--format", "csv"]);
    assert_eq!(a.lines().count(), b.lines().count());
}

#[test]
fn kappa_one_on_two_points() {
    let text = stdout_of(&["kappa", "--n", "2", "--i", "1"]);
    assert!(text.lines().any(|l| l == "2 * D(ab|c12)"), "missing coefficient 2 term:\n{text}");
    assert!(text.contains("total multiplicity 5"));
}

#[test]
fn kappa_multi_index_runs() {
    let out = strata(&["kappa", "--n", "4", "--r", "2,2", "--format", "json"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).expect("valid json");
    assert!(!v["terms"].as_array().expect("array").is_empty());
}

#[test]
fn oracle_slides_sweep_passes() {
    let out = strata(&["oracle", "--check", "slides", "--n", "3"]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("0 mismatches"));
}

#[test]
fn oracle_sampled_sweep_is_seeded() {
    let args = ["oracle", "--check", "slides", "--n", "4", "--samples", "20", "--seed", "7"];
    let out = strata(&args);
    assert!(out.status.success());
    assert_eq!(out.stdout, strata(&args).stdout);
}

#[test]
fn oracle_main_check_matches() {
    let out = strata(&["oracle", "--check", "main", "--k", "1,0,2", "--flavor", "psi"]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("match"));
}

#[test]
fn patterns_avoiders_counts_bell() {
    let text = stdout_of(&["patterns", "avoiders", "--n", "4"]);
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 15);
}

#[test]
fn patterns_bell() {
    assert_eq!(stdout_of(&["patterns", "bell", "--n", "6"]).trim(), "203");
}

#[test]
fn patterns_tree_and_word_round_trip() {
    let tree_json = stdout_of(&["patterns", "tree", "--word", "2143", "--format", "json"]);
    let out = strata_stdin(&["patterns", "word"], &tree_json);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "2143");
}

#[test]
fn counts_row_for_full_composition() {
    let text = stdout_of(&["counts", "--n", "3"]);
    assert!(text.lines().any(|l| l == "k=1,0,2 psi=3 omega=2"), "missing row:\n{text}");
}

#[test]
fn export_round_trips_json() {
    let json = stdout_of(&["slide", "--flavor", "psi", "--k", "1,0,2", "--format", "json"]);
    let out = strata_stdin(&["export", "--format", "json"], &json);
    assert!(out.status.success());
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), json.trim());
}

#[test]
fn output_is_byte_deterministic() {
    for args in [
        vec!["slide", "--flavor", "psi", "--k", "0,1,1,2", "--format", "json"],
        vec!["tour", "--k", "0,0,2,2", "--format", "json", "--log"],
        vec!["kappa", "--n", "3", "--i", "2", "--format", "csv"],
        vec!["counts", "--n", "4", "--format", "json"],
    ] {
        assert_eq!(strata(&args).stdout, strata(&args).stdout, "nondeterministic: {args:?}");
    }
}

#[test]
fn dot_output_is_valid_enough() {
    let text = stdout_of(&["slide", "--flavor", "psi", "--k", "2,0", "--format", "dot"]);
    assert!(text.contains("graph"));
}
