use std::io::Write;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::NamedTempFile;

fn feltfp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_feltfp"))
        .args(args)
        .env_remove("FELTFP_SEED")
        .output()
        .unwrap()
}

fn file(contents: &str) -> NamedTempFile {
    let mut f = NamedTempFile::new().unwrap();
    f.write_all(contents.as_bytes()).unwrap();
    f
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn check_maxpm_half_passes() {
    let out = feltfp(&[
        "check",
        "--space",
        "builtin:maxpm:0,1",
        "--map",
        "builtin:half",
    ]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    let text = stdout(&out);
    assert!(text.lines().any(|l| l.contains("upper_band")));
    assert!(!text.contains("FAIL"));
}

#[test]
fn asymmetric_file_fails_symmetry() {
    let f = file(r#"{"distance": [[0, 1], [0.5, 0]]}"#);
    let out = feltfp(&["check", "--space", f.path().to_str().unwrap(), "--json"]);
    assert_eq!(code(&out), 1);
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    let sym = doc["reports"]
        .as_array()
        .unwrap()
        .iter()
        .find(|r| r["check"] == "symmetry")
        .unwrap();
    assert_eq!(sym["verdict"], "fail");
    assert_eq!(sym["witness"]["values"], serde_json::json!([1.0, 0.5]));
    assert_eq!(doc["ok"], false);
}

#[test]
fn malformed_files_are_input_errors() {
    let f = file("not json at all\n");
    let out = feltfp(&["check", "--space", f.path().to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 1"));

    let f = file("{\n  \"distance\": [[0, 1], [1]]\n}");
    let out = feltfp(&["check", "--space", f.path().to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("row 1"));

    let out = feltfp(&["check", "--space", "/nonexistent/space.json"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(code(&feltfp(&["check"])), 2);
    assert_eq!(code(&feltfp(&["check", "--space", "builtin:nope"])), 2);
    assert_eq!(
        code(&feltfp(&[
            "check",
            "--space",
            "builtin:euclid:0,1",
            "--map",
            "builtin:wat"
        ])),
        2
    );
    assert_eq!(code(&feltfp(&["frobnicate"])), 2);
    assert_eq!(code(&feltfp(&["stress", "--n", "9"])), 2);
    assert_eq!(
        code(&feltfp(&["stress", "--n", "2", "--alphabet", "x,1"])),
        2
    );
    assert_eq!(
        code(&feltfp(&[
            "iterate",
            "--space",
            "builtin:euclid:0,1",
            "--map",
            "builtin:cos"
        ])),
        2
    );
}

#[test]
fn x0_outside_domain_exits_2() {
    let out = feltfp(&[
        "iterate",
        "--space",
        "builtin:euclid:0,1",
        "--map",
        "builtin:cos",
        "--x0",
        "3",
    ]);
    assert_eq!(code(&out), 2);
    let f = file(r#"{"points": ["a", "b"], "distance": [[0, 1], [1, 0]], "map": [1, 0]}"#);
    let out = feltfp(&[
        "iterate",
        "--space",
        f.path().to_str().unwrap(),
        "--x0",
        "c",
    ]);
    assert_eq!(code(&out), 2);
}

#[test]
fn iterate_cos_certifies() {
    let out = feltfp(&[
        "iterate",
        "--space",
        "builtin:euclid:0,1",
        "--map",
        "builtin:cos",
        "--x0",
        "0",
        "--tol-fixed",
        "1e-9",
        "--json",
    ]);
    assert_eq!(code(&out), 0);
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    let x = doc["result"]["x_star"].as_f64().unwrap();
    assert!((x - 0.7390851332).abs() < 1e-9);
    assert_eq!(doc["result"]["stopped_reason"], "vanished");
}

#[test]
fn swap_cycle_is_uncertified() {
    let f = file(r#"{"points": ["a", "b"], "distance": [[0, 1], [1, 0]], "map": [1, 0]}"#);
    let out = feltfp(&[
        "iterate",
        "--space",
        f.path().to_str().unwrap(),
        "--x0",
        "a",
        "--json",
    ]);
    assert_eq!(code(&out), 1);
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["result"]["stopped_reason"], "cycle_detected");
    assert_eq!(doc["result"]["certified"], false);

    // the swap map is nonexpansive, so check passes; only iteration fails
    let out = feltfp(&["check", "--space", f.path().to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
}

#[test]
fn max_iter_cap_is_uncertified() {
    let out = feltfp(&[
        "iterate",
        "--space",
        "builtin:euclid:0,1",
        "--map",
        "builtin:cos",
        "--x0",
        "0",
        "--max-iter",
        "3",
    ]);
    assert_eq!(code(&out), 1);
    let text = stdout(&out);
    assert!(text.contains("max_iter"));
    assert!(text.contains("certified     no"));
}

#[test]
fn identity_on_the_line_fails_the_upper_band() {
    let out = feltfp(&[
        "check",
        "--space",
        "builtin:euclid:0,1",
        "--map",
        "builtin:ident",
    ]);
    assert_eq!(code(&out), 1);
    let line = stdout(&out)
        .lines()
        .find(|l| l.contains("upper_band"))
        .unwrap()
        .to_string();
    assert!(
        line.starts_with("FAIL") && line.contains("witness"),
        "{line}"
    );
}

#[test]
fn stress_and_fuzz_are_clean() {
    let out = feltfp(&["stress", "--n", "3", "--alphabet", "0,0.5,1", "--json"]);
    assert_eq!(code(&out), 0);
    let s: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(s["cases_total"], 5832);
    assert_eq!(s["counterexamples"], serde_json::json!([]));

    let out = feltfp(&[
        "fuzz", "--n", "3", "--trials", "1000", "--seed", "42", "--json",
    ]);
    assert_eq!(code(&out), 0);
    let s: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(s["seed"], 42);
    assert_eq!(s["cases_total"], 1000);
}

#[test]
fn seed_falls_back_to_the_environment() {
    let run = |env: Option<&str>, extra: &[&str]| {
        let mut c = Command::new(env!("CARGO_BIN_EXE_feltfp"));
        c.args(["fuzz", "--n", "3", "--trials", "50", "--json"])
            .args(extra);
        match env {
            Some(v) => c.env("FELTFP_SEED", v),
            None => c.env_remove("FELTFP_SEED"),
        };
        let s: Value = serde_json::from_slice(&c.output().unwrap().stdout).unwrap();
        s["seed"].as_u64().unwrap()
    };
    assert_eq!(run(None, &[]), 0);
    assert_eq!(run(Some("9"), &[]), 9);
    assert_eq!(run(Some("9"), &["--seed", "4"]), 4);
}
