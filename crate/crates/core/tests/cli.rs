use std::process::Command;

use clap::Parser;
use dlad_core::cli::{run, Cli};
use serde_json::Value;

fn run_args(args: &[&str]) -> (i32, String, String) {
    let cli = Cli::try_parse_from(std::iter::once("dlad").chain(args.iter().copied())).unwrap();
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run(&cli, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn binary(args: &[&str]) -> (i32, String) {
    let o = Command::new(env!("CARGO_BIN_EXE_dlad")).args(args).output().unwrap();
    (o.status.code().unwrap(), String::from_utf8(o.stdout).unwrap())
}

fn json_lines(s: &str) -> Vec<Value> {
    s.lines().map(|l| serde_json::from_str(l).unwrap()).collect()
}

#[test]
fn classes_census_lines() {
    let (code, out, _) = run_args(&["classes", "--p", "5", "--denom", "2"]);
    assert_eq!(code, 0);
    let lines = json_lines(&out);
    assert_eq!(lines.len(), 3);
    assert!(lines.iter().all(|l| l.get("rep").is_some() && l.get("a_order").is_some()));
    let (code, out, _) = run_args(&["classes", "--p", "5", "--denom", "1"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().count(), 1);
}

#[test]
fn denominator_divisible_by_p_is_usage_error() {
    let (code, out, err) = run_args(&["classes", "--p", "5", "--denom", "10"]);
    assert_eq!(code, 2);
    assert!(out.is_empty());
    assert!(!err.is_empty());
    let (code, _, _) = run_args(&["centralizer", "--p", "3", "--x", "0,1/3,0,0"]);
    assert_eq!(code, 2);
}

#[test]
fn centralizer_report() {
    let (code, out, _) = run_args(&["centralizer", "--p", "5", "--x", "0,1/4,1/2,3/4"]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(out.trim()).unwrap();
    assert_eq!(v["a_order"], 4);
    assert_eq!(v["verdict"], "pass");
}

#[test]
fn check_suites_pass() {
    for args in [
        &["check", "thmB", "--q", "5", "--x", "0,1/4,1/2,3/4"][..],
        &["check", "prop21", "--q", "3"],
        &["check", "graphauto", "--q", "3"],
        &["check", "thmA", "--p", "5", "--denom", "4"],
        &["check", "rem24", "--p", "5", "--denom", "4"],
    ] {
        let (code, out, err) = run_args(args);
        assert_eq!(code, 0, "{args:?}: {err}");
        let v: Value = serde_json::from_str(out.trim()).unwrap();
        assert_eq!(v["verdict"], "pass", "{args:?}");
    }
}

#[test]
fn violated_hypothesis_exits_one() {
    let (code, out, _) = run_args(&["check", "cor32", "--q", "5", "--x", "0,0,0,1/2"]);
    assert_eq!(code, 1);
    let v: Value = serde_json::from_str(out.trim()).unwrap();
    assert_eq!(v["verdict"], "hypothesis_violated");
}

#[test]
fn tsv_ends_with_verdict() {
    let (code, out, _) = run_args(&["centralizer", "--p", "5", "--x", "0,1/4,1/2,3/4", "--format", "tsv"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().last(), Some("verdict\tpass"));
}

#[test]
fn output_is_deterministic() {
    for args in [
        &["classes", "--p", "5", "--denom", "8"][..],
        &["check", "crosscheck", "--p", "3", "--seed", "9"],
        &["check", "scenario", "--q", "5", "--denom", "48"],
    ] {
        let a = run_args(args);
        let b = run_args(args);
        assert_eq!(a, b, "{args:?}");
    }
}

#[test]
fn binary_exit_codes() {
    assert_eq!(binary(&["classes", "--p", "5", "--denom", "2"]).0, 0);
    assert_eq!(binary(&["classes", "--p", "5", "--denom", "10"]).0, 2);
    assert_eq!(binary(&["classes", "--p", "5", "--denom", "two"]).0, 2);
    assert_eq!(binary(&["check", "cor32", "--q", "5", "--x", "0,0,0,1/2"]).0, 1);
    assert_eq!(binary(&["check", "nosuch", "--q", "5"]).0, 2);
    let (code, out) = binary(&["check", "scenario", "--q", "5", "--denom", "48"]);
    assert_eq!(code, 0);
    assert!(out.contains("\"verdict\":\"pass\"") || out.contains("\"verdict\": \"pass\""));
}
