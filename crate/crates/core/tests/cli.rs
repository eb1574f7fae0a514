use std::process::{Command, Output};

use serde_json::Value;

fn wildram(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wildram")).args(args).output().unwrap()
}

fn json_of(args: &[&str]) -> (String, Value) {
    let out = wildram(args);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let v = serde_json::from_str(&text).unwrap();
    (text, v)
}

#[test]
fn json_round_trips_byte_for_byte() {
    let cases: &[&[&str]] = &[
        &["cohom", "--p", "5", "--m", "2", "--json"],
        &["cohom-structure", "--p", "3", "--m", "5", "--json"],
        &["chebyshev", "--p", "7", "--json"],
        &["versal-m1", "--p", "5", "--json"],
        &["polar", "--p", "3", "--input", "T^-9+T^-3", "--json"],
        &["harbater", "--p", "3", "--conductors", "2,4,5", "--json"],
        &["genus", "--p", "5", "--conductors", "4", "--genus-quotient", "0", "--json"],
        &["asdeform", "--p", "3", "--m", "5", "--ring", "Fp(3)[e]/(e^2)", "--json"],
        &["asdeform", "--p", "5", "--m", "9", "--direction", "1", "--json"],
        &["order-check", "--p", "5", "--m", "2", "--ring", "Fp(5)[u]/(u^4)", "--a", "1+u", "--json"],
        &["obstruction", "--p", "5", "--m", "1", "--ring", "F5[u]/(u^3)", "--a", "u", "--json"],
        &["krull", "--p", "2", "--m", "5", "--json"],
        &["global", "--p", "5", "--conductors", "2", "--genus-quotient", "0", "--json"],
    ];
    for args in cases {
        let (text, v) = json_of(args);
        let mut again = serde_json::to_string_pretty(&v).unwrap();
        again.push('\n');
        assert_eq!(again, text, "{args:?}");
    }
}

#[test]
fn text_and_json_agree() {
    let args = ["global", "--p", "5", "--conductors", "4"];
    let text = String::from_utf8(wildram(&args).stdout).unwrap();
    let (_, v) = json_of(&[&args[..], &["--json"]].concat());
    assert_eq!(text, wildram::cli::render_text(&v));
    assert!(text.contains("krull_global: 3"));
    assert!(text.contains("moduli_dim: 3"));
}

#[test]
fn documented_examples() {
    let (_, v) = json_of(&["cohom", "--p", "5", "--m", "2", "--json"]);
    assert_eq!((v["dim_h1"].as_i64(), v["dim_h2"].as_i64()), (Some(1), Some(1)));
    assert_eq!(v["stabilized"], Value::Bool(true));

    let out = String::from_utf8(wildram(&["chebyshev", "--p", "5"]).stdout).unwrap();
    assert!(out.contains("psi: X^2+5*X+5") && out.contains("bezout_verified: true"));

    let (_, v) = json_of(&["krull", "--p", "5", "--m", "3", "--json"]);
    assert_eq!(v["absolute"].as_u64(), Some(1));

    let (_, v) = json_of(&["obstruction", "--p", "5", "--m", "2", "--ring", "F5[u]/(u^5)", "--a", "1+u", "--json"]);
    assert_eq!(v["formula_matches"], Value::Bool(true));
    assert!(v["defect"].as_str().unwrap().starts_with("(2*u^4)*T^3"));

    let (_, v) = json_of(&["global", "--p", "5", "--conductors", "2", "--genus-quotient", "0", "--json"]);
    assert!(!v["consistency_flags"].as_array().unwrap().is_empty());
}

#[test]
fn exit_codes() {
    assert_eq!(wildram(&["cohom", "--p", "4", "--m", "2"]).status.code(), Some(2));
    assert_eq!(wildram(&["nonsense"]).status.code(), Some(2));
    assert_eq!(wildram(&["krull", "--p", "5", "--m", "10"]).status.code(), Some(2));
    assert_eq!(wildram(&["order-check", "--p", "5", "--m", "2", "--ring", "Fp(5)[u]/(u^4)", "--a", "1+v"]).status.code(), Some(2));
    assert_eq!(wildram(&["cohom", "--p", "5", "--m", "2", "--prec", "1"]).status.code(), Some(3));
    // σ_{1+u} is not of order 5 over u^6, so the obstruction precondition fails
    assert_eq!(
        wildram(&["obstruction", "--p", "5", "--m", "2", "--ring", "F5[u]/(u^6)", "--a", "1+u"]).status.code(),
        Some(2)
    );
}

#[test]
fn verify_with_custom_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    let out = dir.path().join("report.json");
    std::fs::write(&cfg, r#"{"primes":[5],"max_m":2}"#).unwrap();
    let res = wildram(&["verify", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap(), "--json"]);
    assert_eq!(res.status.code(), Some(0));
    let report: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let rec = report["records"]
        .as_array()
        .unwrap()
        .iter()
        .find(|r| r["id"] == "cohomology/p=05/m=02")
        .unwrap();
    assert_eq!(rec["observed"]["dim_h1"].as_i64(), Some(1));

    std::fs::write(&cfg, r#"{"primes":[6],"max_m":2}"#).unwrap();
    assert_eq!(wildram(&["verify", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
}
