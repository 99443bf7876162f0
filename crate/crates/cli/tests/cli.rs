//! End-to-end checks of the binary: file parsing, report shape, exit codes,
//! and the round trip of emitted certificates back through verification.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_bandcalc")
}

fn write(dir: &Path, name: &str, contents: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, contents).expect("write fixture");
    path
}

fn run(args: &[&str]) -> Output {
    Command::new(bin()).args(args).output().expect("run binary")
}

fn stdout_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON: {e}\n{}",
            String::from_utf8_lossy(&out.stdout)
        )
    })
}

fn tempdir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("bandcalc-cli-{tag}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).expect("mkdir");
    dir
}

const TRIVIAL3: &str =
    r#"{"circles":3,"bands":[{"from":1,"to":2,"word":[]},{"from":2,"to":3,"word":[]}]}"#;
const SPUN_TREFOIL: &str = r#"{"circles":2,"bands":[{"from":1,"to":2,"word":[[1,1],[2,1]]}]}"#;
const SPHERE: &str = r#"{"fusion":{"circles":2,"bands":[{"from":1,"to":2,"word":[[1,-1],[2,1]]}]},"maxima":2,"fission_words":[[[2,1],[1,1],[2,-1]]],"fusion_words_dual":null}"#;

#[test]
fn invariants_of_trivial_diagram() {
    let dir = tempdir("inv");
    let f = write(&dir, "trivial3.json", TRIVIAL3);
    let out = run(&["invariants", f.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["verdict"], "OK");
    assert_eq!(v["invariants"]["alexander"], serde_json::json!([[0, 1]]));
}

#[test]
fn undisking_bound_one_emits_replayable_certificate() {
    let dir = tempdir("undisk");
    let f = write(&dir, "spun_trefoil.json", SPUN_TREFOIL);
    let out = run(&["undisking", "--bound", "1", f.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    let cert = v["certificate"].clone();
    assert_eq!(cert["passes"].as_array().unwrap().len(), 1);

    // feed the emitted certificate back through triangularize
    let cert_file = write(&dir, "cert.json", &cert.to_string());
    let out = run(&[
        "triangularize",
        f.to_str().unwrap(),
        "--certificate",
        cert_file.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["verdict"], "OK");
}

#[test]
fn undisking_bound_zero_reports_obstruction() {
    let dir = tempdir("undisk0");
    let f = write(&dir, "spun_trefoil.json", SPUN_TREFOIL);
    let out = run(&["undisking", "--bound", "0", f.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let v = stdout_json(&out);
    assert_eq!(v["verdict"], "UNKNOWN");
    assert_eq!(
        v["invariants"]["alexander_obstruction"],
        serde_json::json!([[0, 1], [1, -1], [2, 1]])
    );
}

#[test]
fn sphere_pipeline_handles_gluck_product_ball() {
    let dir = tempdir("sphere");
    let f = write(&dir, "sphere.json", SPHERE);

    let out = run(&["handles", f.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["counts"]["counts"], serde_json::json!([1, 2, 3, 1, 1]));

    let out = run(&["gluck-pres", f.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));

    let out = run(&["product-ball", f.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["result"]["verdict"], "CERTIFIED_B5");

    // the emitted certificate verifies against the induced presentation
    let cert = v["certificate"].clone();
    let gp = stdout_json(&run(&["gluck-pres", f.to_str().unwrap()]))["result"].clone();
    let gp_file = write(&dir, "gp.json", &gp.to_string());
    let cert_file = write(&dir, "cert.json", &cert.to_string());
    let out = run(&[
        "ac-verify",
        gp_file.to_str().unwrap(),
        "--certificate",
        cert_file.to_str().unwrap(),
        "--m",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn step2_certifies_within_default_budget() {
    let dir = tempdir("step2");
    let f = write(&dir, "sphere.json", SPHERE);
    let out = run(&["step2", f.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
}

#[test]
fn ac_search_budget_exhaustion_exits_unknown() {
    let dir = tempdir("ak");
    let f = write(
        &dir,
        "ak3.json",
        r#"{"generators":2,"relators":[[[1,1],[2,1],[1,1],[2,-1],[1,-1],[2,-1]],[[1,1],[1,1],[1,1],[1,1],[2,-1],[2,-1],[2,-1]]]}"#,
    );
    let out = run(&["ac-search", f.to_str().unwrap(), "--m", "2", "--max-nodes", "200"]);
    assert_eq!(out.status.code(), Some(2));
    let v = stdout_json(&out);
    assert_eq!(v["verdict"], "UNKNOWN");
    assert_eq!(v["budget"]["nodes_expanded"], 200);
}

#[test]
fn ac_search_finds_small_certificate() {
    let dir = tempdir("acs");
    let f = write(
        &dir,
        "p.json",
        r#"{"generators":2,"relators":[[[1,1],[2,-1]],[[2,1]]]}"#,
    );
    let out = run(&["ac-search", f.to_str().unwrap(), "--m", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    let cert_file = write(&dir, "cert.json", &v["certificate"].to_string());
    let out = run(&[
        "ac-verify",
        f.to_str().unwrap(),
        "--certificate",
        cert_file.to_str().unwrap(),
        "--m",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn parse_errors_use_usage_exit_code_with_field_path() {
    let dir = tempdir("parse");
    let f = write(&dir, "bad.json", r#"{"circles":2,"bands":[{"from":1,"to":2,"word":[[1]]}]}"#);
    let out = run(&["validate", f.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(64));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("bands[0].word[0]"), "stderr: {err}");

    let f = write(&dir, "zero.json", r#"{"circles":0,"bands":[]}"#);
    let out = run(&["validate", f.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(64));
}

#[test]
fn missing_file_exit_code() {
    let out = run(&["validate", "/definitely/not/here.json"]);
    assert_eq!(out.status.code(), Some(66));
}

#[test]
fn moves_apply_script() {
    let dir = tempdir("moves");
    let f = write(&dir, "trivial3.json", TRIVIAL3);
    let script = write(&dir, "script.json", r#"[{"op":"cancel","band":2}]"#);
    let out = run(&[
        "moves",
        "apply",
        f.to_str().unwrap(),
        script.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["result"]["circles"], 2);

    // a blocked move fails with exit 1
    let script = write(&dir, "bad_script.json", r#"[{"op":"cancel","band":1}]"#);
    let out = run(&[
        "moves",
        "apply",
        f.to_str().unwrap(),
        script.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn pathform_normalizes_star() {
    let dir = tempdir("path");
    let star = write(
        &dir,
        "star.json",
        r#"{"circles":3,"bands":[{"from":1,"to":2,"word":[]},{"from":1,"to":3,"word":[]}]}"#,
    );
    let out = run(&["pathform", star.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(
        v["result"]["bands"],
        serde_json::json!([
            {"from": 1, "to": 2, "word": []},
            {"from": 2, "to": 3, "word": []}
        ])
    );
}

#[test]
fn catalog_round_trip() {
    let out = run(&["catalog", "list"]);
    assert_eq!(out.status.code(), Some(0));

    let out = run(&["catalog", "get", "spun-twist", "--n", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    // the payload parses back as a diagram and its order ideal matches
    let dir = tempdir("cat");
    let f = write(&dir, "st2.json", &v["result"].to_string());
    let out = run(&["invariants", f.to_str().unwrap()]);
    let v = stdout_json(&out);
    assert_eq!(
        v["invariants"]["alexander"],
        serde_json::json!([[0, 2], [1, -5], [2, 2]])
    );
}

#[test]
fn threads_flag_does_not_change_the_report() {
    let dir = tempdir("threads");
    let f = write(&dir, "spun_trefoil.json", SPUN_TREFOIL);
    let base = run(&["undisking", "--bound", "1", f.to_str().unwrap()]);
    for t in ["2", "4"] {
        let out = run(&["undisking", "--threads", t, "--bound", "1", f.to_str().unwrap()]);
        assert_eq!(out.stdout, base.stdout);
    }
}
