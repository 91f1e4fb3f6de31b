//! End-to-end tests driving the compiled binary.

use std::process::{Command, Output};

fn tideal(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tideal"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("stdout is utf-8")
}

#[test]
fn dprobe_prints_nilpotency_degree() {
    let out = tideal(&["dprobe", "--n", "2"]);
    assert!(out.status.success());
    assert_eq!(stdout_of(&out), "d(2) = 3\n");
}

#[test]
fn zeta_text_matches_examples() {
    let out = tideal(&["zeta", "--order", "4", "--k", "1"]);
    assert!(out.status.success());
    assert_eq!(stdout_of(&out), "not invertible (gcd(2,4)=2)\n");

    let out = tideal(&["zeta", "--order", "5", "--k", "1", "--oracle"]);
    assert!(out.status.success());
    let text = stdout_of(&out);
    assert!(text.starts_with("invertible (gcd(2,5)=1)\n"));
    assert!(text.contains("circulant rank = 5 of 5 (agrees)"));
}

#[test]
fn decompose_json_round_trips() {
    let out = tideal(&["decompose", "--n", "3", "--m", "4", "--format", "json"]);
    assert!(out.status.success());
    let value: serde_json::Value = serde_json::from_str(&stdout_of(&out)).expect("valid json");
    assert_eq!(value["dim"], "12");
    assert_eq!(value["prune"], true);
    let parsed: tideal::decomposition::Decomposition =
        serde_json::from_value(value["decomposition"].clone()).expect("decomposition round-trips");
    let direct = tideal::decomposition::decompose_w(3, 4, true).unwrap();
    assert_eq!(parsed, direct);
}

#[test]
fn dim_json_reports_method() {
    let out = tideal(&[
        "dim", "--n", "2", "--m", "3", "--method", "both", "--format", "json",
    ]);
    assert!(out.status.success());
    let value: serde_json::Value = serde_json::from_str(&stdout_of(&out)).expect("valid json");
    assert_eq!(value["dim"], 6);
    assert_eq!(value["method"], "both");
}

#[test]
fn bounds_text_reports_sandwich() {
    let out = tideal(&["bounds", "--n", "2", "--m", "3", "--with-dim"]);
    assert!(out.status.success());
    let text = stdout_of(&out);
    assert!(text.contains("omega upper bound    = 6"));
    assert!(text.contains("latyshev lower bound = 5"));
    assert!(text.contains("coprime lower bound  = 6"));
    assert!(text.contains("sandwich             = ok"));

    let out = tideal(&["bounds", "--n", "2", "--m", "4"]);
    assert!(out.status.success());
    assert!(stdout_of(&out).contains("not applicable (gcd(n,m) > 1)"));
}

#[test]
fn bounds_fit_recovers_quadratic() {
    let out = tideal(&["bounds", "--fit-k", "1", "--from", "3", "--to", "5"]);
    assert!(out.status.success());
    let text = stdout_of(&out);
    assert!(text.contains("p(n) = n^2 + n"));
    assert!(text.contains("validated = yes"));
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["nonsense"][..],
        &["decompose", "--n", "5", "--m", "3"],
        &["zeta", "--order", "4", "--k", "9"],
        &["bounds", "--n", "2", "--fit-k", "1"],
        &["decompose", "--n", "3"],
    ] {
        let out = tideal(args);
        assert_eq!(out.status.code(), Some(2), "args {args:?}");
    }
}

#[test]
fn budget_refusal_exits_three() {
    let out = tideal(&["dprobe", "--n", "4"]);
    assert_eq!(out.status.code(), Some(3));

    let out = tideal(&["dprobe", "--n", "4", "--m-max", "7"]);
    assert!(out.status.success());
    assert_eq!(stdout_of(&out), "d(4) > 7 (searched up to m = 7)\n");
}

#[test]
fn verify_fast_is_deterministic_and_passes() {
    let first = tideal(&["verify", "fast", "--seed", "7"]);
    assert_eq!(first.status.code(), Some(0));
    let second = tideal(&["verify", "fast", "--seed", "7"]);
    assert_eq!(first.stdout, second.stdout);
    let text = stdout_of(&first);
    assert!(text.contains("17/17 checks passed"), "unexpected: {text}");
    assert!(!text.contains("FAIL"));
}

#[test]
fn workers_flag_does_not_change_results() {
    let one = tideal(&["--workers", "1", "decompose", "--n", "3", "--m", "5"]);
    let many = tideal(&["--workers", "4", "decompose", "--n", "3", "--m", "5"]);
    assert!(one.status.success());
    assert_eq!(one.stdout, many.stdout);
}

#[test]
fn stabilize_json_round_trips() {
    let out = tideal(&[
        "stabilize", "--k", "1", "--n-min", "3", "--n-max", "4", "--format", "json",
    ]);
    assert!(out.status.success());
    let report: tideal::stability::StabilizationReport =
        serde_json::from_str(&stdout_of(&out)).expect("report round-trips");
    assert_eq!(report.k, 1);
    assert_eq!(report.decompositions.len(), 2);
}
