use std::process::Command;

use serde_json::Value;

fn unitsum(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_unitsum")).args(args).output().expect("binary runs");
    (
        out.status.code().expect("exit code"),
        String::from_utf8(out.stdout).expect("utf-8"),
        String::from_utf8(out.stderr).expect("utf-8"),
    )
}

fn schema() -> jsonschema::Validator {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../schemas/output.json");
    let text = std::fs::read_to_string(path).expect("schema file");
    jsonschema::validator_for(&serde_json::from_str(&text).expect("schema is JSON")).expect("schema compiles")
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut all = args.to_vec();
    all.push("--json");
    let (code, out, _) = unitsum(&all);
    let v: Value = serde_json::from_str(&out).unwrap_or_else(|e| panic!("{out}: {e}"));
    if let Err(e) = schema().validate(&v) {
        panic!("{v} violates the schema: {e}");
    }
    (code, v)
}

#[test]
fn classify_json() {
    let (code, v) = json(&["classify", "--field", "GF(5)", "--curve", "y^2 = x^2+1"]);
    assert_eq!(code, 0);
    assert_eq!(v["kind"], "classification");
    assert_eq!(v["verdict"], "omega");
    assert_eq!(v["input_echo"]["curve"], "y^2 = x^2+1");
    let (_, v) = json(&["classify", "--field", "GF(2)", "--curve", "y^2 + (x)y + (x^2+x) = 0"]);
    assert_eq!(v["verdict"], "infinity");
}

#[test]
fn classify_trail() {
    let (code, out, _) = unitsum(&["classify", "--field", "GF(5)", "--curve", "y^2 = x^2+1"]);
    assert_eq!(code, 0);
    assert!(out.contains("deg f = 2; lc(f) = 1 is a square in GF(5) ⇒ u(O_F) = ω"), "{out}");
}

#[test]
fn decompose_rational() {
    let (code, out, _) = unitsum(&["decompose", "--field", "GF(5)", "--places", "inf,x", "--elem", "(x^2+1)/x"]);
    assert_eq!(code, 0);
    assert_eq!(out.trim(), "x + 1/x");
    let (_, v) = json(&["decompose", "--field", "GF(5)", "--places", "inf,x", "--elem", "(x^2+1)/x"]);
    assert_eq!(v["count"], 2);
}

#[test]
fn decompose_quadratic() {
    let (code, v) = json(&["decompose", "--field", "GF(5)", "--curve", "y^2 = x^2+1", "--elem", "x"]);
    assert_eq!(code, 0);
    assert!(v["count"].as_u64().unwrap() >= 1);
    let (code, v) = json(&["decompose", "--field", "GF(5)", "--curve", "y^2 = x^4+1", "--elem", "x"]);
    assert_eq!(code, 1);
    assert_eq!(v["kind"], "error");
}

#[test]
fn nonrep_text() {
    let (code, out, _) = unitsum(&["nonrep", "--p", "2", "--M", "2", "--A", "1"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("n = 11 (certified mod 2^T"), "{out}");
    let (_, v) = json(&["nonrep", "--p", "2", "--M", "1", "--A", "1"]);
    assert_eq!(v["n"], 3);
}

#[test]
fn units_and_powers() {
    let (_, v) = json(&["fundamental-unit", "--field", "GF(5)", "--curve", "y^2 = x^4+1"]);
    assert_eq!(v["unit"], "x^2 + y");
    assert_eq!(v["mu"], "4");
    let (code, v) = json(&["powers", "--field", "GF(5)", "--curve", "y^2 = x^4+1", "--n", "4"]);
    assert_eq!(code, 0);
    let rows = v["powers"].as_array().unwrap();
    assert_eq!(rows.len(), 5);
    assert_eq!(rows[4]["deg_a"], 8);
    assert_eq!(rows[4]["deg_b"], 6);
}

#[test]
fn valuation_and_height() {
    let (_, v) = json(&["valuation", "--field", "GF(5)", "--elem", "(x^2+1)/x^3", "--place", "x"]);
    assert_eq!(v["valuation"], -3);
    let (_, v) = json(&["height", "--field", "GF(5)", "--elem", "(x^2+1)/x^3"]);
    assert_eq!(v["height"], 3);
}

#[test]
fn witness_verdicts() {
    let base = ["witness", "--field", "GF(2)", "--places", "inf,x,x+1", "--elem", "x^2+x+1"];
    let (code, v) = json(&[&base[..], &["--max-units", "1"]].concat());
    assert_eq!((code, v["verdict"].as_str()), (0, Some("not-representable-exact")));
    let (code, v) = json(&[&base[..], &["--max-units", "2"]].concat());
    assert_eq!((code, v["verdict"].as_str()), (0, Some("representable")));
    assert_eq!(v["certificate"][0]["unit"], "x^2");
    assert_eq!(v["certificate"][1]["unit"], "x+1");
    let (code, v) = json(&[&base[..], &["--max-units", "2", "--height-bound", "1"]].concat());
    assert_eq!((code, v["verdict"].as_str()), (3, Some("none-within-bounds")));
    let (code, v) = json(&["witness", "--field", "GF(5)", "--curve", "y^2 = x^4+1", "--elem", "x"]);
    assert_eq!((code, v["verdict"].as_str()), (0, Some("not-representable-exact")));
}

#[test]
fn parse_errors_carry_position() {
    let (code, v) = json(&["classify", "--field", "GF(5)", "--curve", "y^2 = x^2+*1"]);
    assert_eq!(code, 1);
    assert_eq!(v["error"]["column"], 11);
    let (code, _, err) = unitsum(&["valuation", "--field", "GF(6)", "--elem", "x", "--place", "x"]);
    assert_eq!(code, 1);
    assert!(err.contains("column 4"), "{err}");
    let (code, _, _) = unitsum(&["classify", "--field", "GF(5)"]);
    assert_eq!(code, 1);
}

#[test]
fn rejected_curve_is_invalid_input() {
    let (code, v) = json(&["classify", "--field", "GF(2)", "--curve", "y^2 + (x)y + (x^2) = 0"]);
    assert_eq!(code, 1);
    assert!(v["error"]["message"].as_str().unwrap().contains("rejected"));
}

#[test]
fn selftest_filter_and_mutation() {
    let (code, out, _) = unitsum(&["selftest", "--filter", "nonrep"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("seed 2024"));
    assert_eq!(out.lines().filter(|l| l.starts_with("PASS")).count(), 1);
    let (code, out, _) = unitsum(&["selftest", "--filter", "degree-laws", "--mutate"]);
    assert_ne!(code, 0);
    assert!(out.contains("FAIL 3 degree-laws"), "{out}");
    let (code, v) = json(&["selftest", "--filter", "classification"]);
    assert_eq!(code, 0);
    assert_eq!(v["criteria"].as_array().unwrap().len(), 1);
}
