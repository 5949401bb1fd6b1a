use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn leavitt(args: &[&str]) -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_leavitt"));
    cmd.args(args).env_remove("LEAVITT_DEPTH");
    cmd
}

fn run(cmd: &mut Command) -> (Value, i32) {
    let Output { status, stdout, .. } = cmd.output().expect("binary runs");
    let doc = serde_json::from_slice(&stdout).unwrap_or(Value::Null);
    (doc, status.code().expect("exit code"))
}

fn graph(name: &str) -> String {
    data(name).to_string_lossy().into_owned()
}

fn golden(name: &str) -> Value {
    serde_json::from_str(&std::fs::read_to_string(data(name)).unwrap()).unwrap()
}

#[test]
fn normal_form() {
    let g = graph("r1.json");
    let (out, code) = run(&mut leavitt(&["nf", "-g", &g, "e.~e"]));
    assert_eq!(code, 0);
    assert_eq!(out["normal_form"], "v");

    let g = graph("r2.json");
    let (out, _) = run(&mut leavitt(&["nf", "-g", &g, "e.~e + f.~f - v"]));
    assert_eq!(out["normal_form"], "0");
}

#[test]
fn product_over_a_prime_field() {
    let g = graph("r2.json");
    let (out, code) = run(&mut leavitt(&["mul", "-g", &g, "-K", "F3", "2*~e", "2*e"]));
    assert_eq!(code, 0);
    assert_eq!(out["product"], "v");
    // e is the special edge at v, so e e* is rewritten through the other loop
    let (out, _) = run(&mut leavitt(&["mul", "-g", &g, "-K", "F3", "2*e", "2*~e"]));
    assert_eq!(out["product"], "v + 2*f.~f");
}

#[test]
fn classify_a2_matches_golden() {
    let g = graph("a2.json");
    let (out, code) = run(&mut leavitt(&["classify", "-g", &g, "--max-deg", "1", "--max-cycle-len", "3"]));
    assert_eq!(code, 0);
    assert_eq!(out, golden("classify_a2.golden.json"));
}

#[test]
fn restrict_quotient_module_matches_golden() {
    let g = graph("toeplitz.json");
    let args = [
        "restrict", "-g", &g, "-K", "F2", "--module", r#"{"cycle":["e"]}"#, "--coeff", "quotient", "--poly", "t^2+t+1",
        "--point", r#"{"cycle":["e"]}"#,
    ];
    let (out, code) = run(&mut leavitt(&args));
    assert_eq!(code, 0);
    assert_eq!(out, golden("restrict_toeplitz_quotient.golden.json"));
}

#[test]
fn twisted_action() {
    let g = graph("r1.json");
    let args = ["act", "-g", &g, "--module", r#"{"cycle":["e"]}"#, "--twist", r#"{"e":"3"}"#, "~e.~e", "e.x"];
    let (out, code) = run(&mut leavitt(&args));
    assert_eq!(code, 0);
    assert_eq!(out["result"], "1/9*x");
}

#[test]
fn verify_twist_suite_passes() {
    let g = graph("r1.json");
    let (out, code) = run(&mut leavitt(&["verify", "-g", &g, "-K", "F3", "--suite", "twist", "--twist", r#"{"e":"2"}"#]));
    assert_eq!(code, 0, "{out}");
    assert_eq!(out["passed"], true);
    assert!(out.get("counterexample").is_none());
}

#[test]
fn verify_all_on_the_toeplitz_graph() {
    let g = graph("toeplitz.json");
    let (out, code) = run(&mut leavitt(&["verify", "-g", &g, "-K", "F2", "--depth", "5"]));
    assert_eq!(code, 0, "{out}");
    assert_eq!(out["passed"], true);
}

#[test]
fn malformed_input_exits_with_one() {
    let g = graph("r1.json");
    let (out, code) = run(&mut leavitt(&["nf", "-g", &g, "e.("]));
    assert_eq!(code, 1);
    assert_eq!(out["exit_code"], 1);

    let (_, code) = run(&mut leavitt(&["nf", "-g", &graph("bad_edge.json"), "e"]));
    assert_eq!(code, 1);

    let (_, code) = run(&mut leavitt(&["nf", "-g", &graph("missing.json"), "e"]));
    assert_eq!(code, 1);

    let (_, code) = run(&mut leavitt(&["frobnicate"]));
    assert_eq!(code, 1);
}

#[test]
fn violated_precondition_exits_with_two() {
    let g = graph("a2.json");
    let (out, code) = run(&mut leavitt(&["verify", "-g", &g, "--suite", "twist"]));
    assert_eq!(code, 2);
    assert!(out["error"].as_str().unwrap().contains("precondition"));

    let g = graph("r1.json");
    let (_, code) = run(&mut leavitt(&["restrict", "-g", &g, "--module", r#"{"cycle":["e"]}"#, "--coeff", "trivial", "--point", r#"{"cycle":["e"]}"#]));
    assert_eq!(code, 2);
}

#[test]
fn depth_comes_from_the_environment() {
    let g = graph("r2.json");
    let orbit = |depth: Option<&str>| {
        let mut cmd = leavitt(&["orbit", "-g", &g, "--point", r#"{"cycle":["e"]}"#]);
        if let Some(d) = depth {
            cmd.env("LEAVITT_DEPTH", d);
        }
        let (out, code) = run(&mut cmd);
        assert_eq!(code, 0);
        (out["depth"].as_u64().unwrap(), out["size"].as_u64().unwrap())
    };
    let (d8, n8) = orbit(None);
    let (d2, n2) = orbit(Some("2"));
    assert_eq!((d8, d2), (8, 2));
    assert!(n2 < n8);
    let (out, _) = run(leavitt(&["orbit", "-g", &g, "--point", r#"{"cycle":["e"]}"#, "--depth", "1"]).env("LEAVITT_DEPTH", "5"));
    assert_eq!(out["depth"], 1);
}

#[test]
fn registries_are_listed() {
    let (out, code) = run(&mut leavitt(&["list"]));
    assert_eq!(code, 0);
    let names = |key: &str| -> Vec<String> {
        let mut found: Vec<String> =
            out[key].as_array().unwrap().iter().map(|v| v.get("name").unwrap_or(v).as_str().unwrap().to_string()).collect();
        found.sort();
        found
    };
    assert_eq!(names("coefficient_modules"), ["quotient", "trivial", "twisted"]);
    assert_eq!(names("tail_rules"), ["thue-morse", "thue-morse-like"]);
    assert_eq!(names("suites"), ["all", "cor2", "noniso", "rem1", "res", "triv", "twist"]);
}
