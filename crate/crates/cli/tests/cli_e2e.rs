//! End-to-end coverage of the CLI surface: every exit-code path, the
//! structured-report schema, and byte-identical stable output.

use std::process::{Command, Output};

fn gapcert(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gapcert"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json_of(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("valid JSON on stdout")
}

#[test]
fn epsilon1_golden_json() {
    let out = gapcert(&["epsilon1", "--p", "1", "--q", "2", "--json", "--stable"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["result"]["value"], "1/42");
    assert_eq!(v["result"]["status"], "proven");
    assert_eq!(
        v["result"]["witness"],
        serde_json::json!([[2, 1], [3, 1], [7, 1]])
    );
    assert_eq!(v["result"]["sylvester_floor"], "1/42");
}

#[test]
fn stable_reports_are_byte_identical() {
    let a = gapcert(&["epsilon1", "--p", "1", "--q", "1", "--json", "--stable"]);
    let b = gapcert(&["epsilon1", "--p", "1", "--q", "1", "--json", "--stable"]);
    assert_eq!(a.stdout, b.stdout);
    // without --stable an elapsed field appears
    let c = gapcert(&["epsilon1", "--p", "1", "--q", "1", "--json"]);
    assert!(json_of(&c).get("elapsed_ms").is_some());
    assert!(json_of(&a).get("elapsed_ms").is_none());
}

#[test]
fn exit_code_zero_paths() {
    for args in [
        vec!["epsilon2", "--p", "1", "--q", "3"],
        vec!["lct-gap", "--p", "5"],
        vec!["glct-gap", "--p", "1"],
        vec!["mld-gap", "--p", "3"],
        vec!["eq2", "--p", "1", "--delta", "1/5"],
        vec!["curve-index", "--p", "2", "--value", "2/3"],
        vec!["curtiss", "--n", "3"],
        vec!["sylvester", "--n", "8"],
        vec!["max-under", "--value", "1", "--n", "3"],
        vec!["member", "--p", "2", "--value", "1/4"],
        vec!["constants"],
        vec!["constants", "--id", "fano3-complement-bound"],
    ] {
        let mut full = args.clone();
        full.push("--json");
        full.push("--stable");
        let out = gapcert(&full);
        assert_eq!(out.status.code(), Some(0), "args {args:?}: {:?}", out);
    }
}

#[test]
fn member_negative_is_still_a_result() {
    let out = gapcert(&["member", "--p", "2", "--value", "1/4", "--json", "--stable"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json_of(&out)["result"]["member"], false);
    let out = gapcert(&["member", "--p", "1", "--value", "41/42", "--json", "--stable"]);
    assert_eq!(json_of(&out)["result"]["witness"], serde_json::json!([42, 1]));
}

#[test]
fn exit_code_two_for_caps_limited() {
    let out = gapcert(&[
        "epsilon1", "--p", "1", "--q", "2", "--caps", "depth=1,den=8", "--json", "--stable",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json_of(&out)["result"]["status"], "proven_within_caps");
}

#[test]
fn exit_code_one_for_falsified_controls() {
    let out = gapcert(&["audit-all", "--include-negative-controls", "--json", "--stable"]);
    assert_eq!(out.status.code(), Some(1));
    let v = json_of(&out);
    let audits = v["result"]["audits"].as_array().unwrap();
    let falsified: Vec<_> = audits
        .iter()
        .filter(|a| a["verdict"] == "falsified")
        .collect();
    assert_eq!(falsified.len(), 2, "exactly the two negative controls");
}

#[test]
fn exit_code_three_for_usage_and_domain_errors() {
    for args in [
        vec!["no-such-command"],
        vec!["epsilon1", "--p", "1"],             // missing --q
        vec!["epsilon1", "--p", "1", "--q", "1", "--bogus-flag"],
        vec!["eq2", "--p", "1", "--delta", "3/2"], // domain
        vec!["eq2", "--p", "1", "--delta", "0.5"], // decimals rejected
        vec!["curve-index", "--p", "1", "--value", "6/7"], // out of range
        vec!["curtiss", "--n", "9"],               // budget
        vec!["constants", "--id", "nope"],
        vec!["epsilon1", "--p", "0", "--q", "1"],
        vec!["epsilon1", "--p", "1", "--q", "1", "--caps", "depth=x"],
    ] {
        let out = gapcert(&args);
        assert_eq!(out.status.code(), Some(3), "args {args:?}");
    }
}

#[test]
fn beta_and_upsilon_certify() {
    let out = gapcert(&["beta", "--p", "2", "--json", "--stable"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["result"]["checks"]["exceeds_tower14"], "gt");
    assert_eq!(v["result"]["checks"]["exceeds_tower17"], "gt");
    assert_eq!(v["result"]["checks"]["below_min_upper"], "lt");

    let out = gapcert(&["upsilon", "--p", "2", "--json", "--stable"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["result"]["l_below_tower17"], "lt");
    assert_eq!(v["result"]["upsilon_above_tower19"], "gt");
}

#[test]
fn audit_all_passes_clean() {
    let out = gapcert(&["audit-all", "--json", "--stable"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    for a in v["result"]["audits"].as_array().unwrap() {
        assert_eq!(a["verdict"], "verified", "claim {}", a["claim"]);
    }
    let suite = v["result"]["beta_suite"].as_array().unwrap();
    assert_eq!(suite.len(), 9); // p = 2..=10
    for row in suite {
        assert_eq!(row["exceeds_tower14"], "gt");
        assert_eq!(row["exceeds_tower17"], "gt");
        assert_eq!(row["below_min_upper"], "lt");
    }
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(gapcert(&["--help"]).status.code(), Some(0));
    assert_eq!(gapcert(&["--version"]).status.code(), Some(0));
}
