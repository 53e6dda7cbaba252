//! End-to-end tests against the real binary: worked examples for every
//! subcommand, the exit-code contract, certificate round-trips, and
//! byte-level determinism across separate processes.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};

fn afpp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_afpp"))
        .args(args)
        .output()
        .expect("the binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("no signal exit")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn write_file(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).expect("fixture write");
    path.to_str().expect("utf-8 path").to_owned()
}

/// Standard fixtures shared by the tests below.
struct Fixtures {
    _dir: tempfile::TempDir,
    interval: String,
    square: String,
    grid_full: String,
    path_tree: String,
    long_interval: String,
    product: String,
    identity3: String,
    torn3: String,
    reflect_tree: String,
    antipodal: String,
    reflect5: String,
    clamp_domain: String,
    clamp_codomain: String,
    clamp_map: String,
    product_identity: String,
}

impl Fixtures {
    fn new() -> Self {
        let dir = tempfile::tempdir().expect("tempdir");
        let d = dir.path();
        let interval = write_file(d, "interval.json", r#"{"box":{"bounds":[[0,2]],"u":1}}"#);
        let square = write_file(d, "square.json", r#"{"box":{"bounds":[[0,1],[0,1]],"u":1}}"#);
        let grid_full = write_file(d, "grid.json", r#"{"box":{"bounds":[[-1,1],[-1,1]],"u":2}}"#);
        let path_tree = write_file(d, "path.json", r#"{"tree":{"edges":[[0,1],[1,2]],"root":0}}"#);
        let long_interval = write_file(d, "five.json", r#"{"box":{"bounds":[[0,4]],"u":1}}"#);
        let product = write_file(
            d,
            "product.json",
            r#"{"product":{"left":{"tree":{"edges":[[0,1],[1,2]],"root":0}},"right":{"box":{"bounds":[[0,2]],"u":1}}}}"#,
        );
        let identity3 = write_file(d, "identity3.json", r#"[[[0],[0]],[[1],[1]],[[2],[2]]]"#);
        let torn3 = write_file(d, "torn3.json", r#"[[[0],[1]],[[1],[0]],[[2],[2]]]"#);
        let reflect_tree = write_file(d, "reflect3.json", r#"[[[0],[2]],[[1],[1]],[[2],[0]]]"#);
        let antipodal = write_file(
            d,
            "antipodal.json",
            r#"[[[0,0],[1,1]],[[0,1],[1,0]],[[1,0],[0,1]],[[1,1],[0,0]]]"#,
        );
        let reflect5 = write_file(
            d,
            "reflect5.json",
            r#"[[[0],[4]],[[1],[3]],[[2],[2]],[[3],[1]],[[4],[0]]]"#,
        );
        let clamp_domain = write_file(d, "clampdom.json", r#"{"box":{"bounds":[[0,3]],"u":1}}"#);
        let clamp_codomain = write_file(d, "clampcod.json", r#"{"box":{"bounds":[[0,1]],"u":1}}"#);
        let clamp_map = write_file(
            d,
            "clamp.json",
            r#"[[[0],[0]],[[1],[1]],[[2],[1]],[[3],[1]]]"#,
        );
        let pairs: Vec<Value> = (0..3)
            .flat_map(|t| (0..3).map(move |z| json!([[t, z], [t, z]])))
            .collect();
        let product_identity = write_file(
            d,
            "prodid.json",
            &serde_json::to_string(&Value::Array(pairs)).expect("json"),
        );
        Fixtures {
            _dir: dir,
            interval,
            square,
            grid_full,
            path_tree,
            long_interval,
            product,
            identity3,
            torn3,
            reflect_tree,
            antipodal,
            reflect5,
            clamp_domain,
            clamp_codomain,
            clamp_map,
            product_identity,
        }
    }

    fn path(&self) -> &Path {
        Path::new(self.interval.as_str()).parent().expect("dir")
    }
}

#[test]
fn decide_interval_holds() {
    let fx = Fixtures::new();
    let out = afpp(&["decide-afpp", &fx.interval]);
    assert_eq!(code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let cert = stdout_json(&out);
    assert_eq!(cert["format"], "afpp-certificate/1");
    assert_eq!(cert["result"]["verdict"]["holds"], json!(true));
    assert_eq!(cert["result"]["verdict"]["exhaustive"], json!(true));
    assert!(cert.get("witness").is_none());
}

#[test]
fn decide_unit_square_fails_with_least_witness() {
    let fx = Fixtures::new();
    let out = afpp(&["decide-afpp", &fx.square]);
    assert_eq!(code(&out), 10);
    let cert = stdout_json(&out);
    assert_eq!(cert["result"]["verdict"]["holds"], json!(false));
    // The first fixed-point-free continuous map in canonical order is the
    // antipodal map, so the witness table starts at (0,0) -> (1,1).
    assert_eq!(cert["witness"][0], json!([[0, 0], [1, 1]]));
    let transcript = cert["transcript"].as_array().expect("transcript");
    assert!(transcript.iter().all(|entry| entry["ok"] == json!(true)));
}

#[test]
fn decide_full_rule_grid_holds() {
    let fx = Fixtures::new();
    let out = afpp(&["decide-afpp", &fx.grid_full]);
    assert_eq!(code(&out), 0);
    let cert = stdout_json(&out);
    assert_eq!(cert["result"]["verdict"]["holds"], json!(true));
}

#[test]
fn find_afp_on_a_tree_reflection() {
    let fx = Fixtures::new();
    let out = afpp(&["find-afp", &fx.path_tree, &fx.reflect_tree]);
    assert_eq!(code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let cert = stdout_json(&out);
    assert_eq!(cert["result"]["vertex"]["point"], json!([1]));
    assert_eq!(cert["parameters"]["resolved_finder"], json!("tree"));
}

#[test]
fn find_afp_interval_reflection_lands_on_the_midpoint() {
    let fx = Fixtures::new();
    let out = afpp(&["find-afp", &fx.long_interval, &fx.reflect5]);
    assert_eq!(code(&out), 0);
    let cert = stdout_json(&out);
    assert_eq!(cert["result"]["vertex"]["point"], json!([2]));
}

#[test]
fn find_afp_rejects_the_antipodal_map() {
    let fx = Fixtures::new();
    let out = afpp(&["find-afp", &fx.square, &fx.antipodal]);
    assert_eq!(code(&out), 11);
}

#[test]
fn find_afp_on_a_tree_times_cube_product() {
    let fx = Fixtures::new();
    let out = afpp(&[
        "find-afp",
        &fx.product,
        &fx.product_identity,
        "--finder",
        "product",
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let cert = stdout_json(&out);
    assert!(cert["result"]["vertex"]["point"].is_array());
    let transcript = cert["transcript"].as_array().expect("transcript");
    assert!(transcript.iter().all(|entry| entry["ok"] == json!(true)));
}

#[test]
fn discontinuous_map_is_its_own_exit_code() {
    let fx = Fixtures::new();
    let out = afpp(&["find-afp", &fx.interval, &fx.torn3]);
    assert_eq!(code(&out), 3);
    assert!(String::from_utf8_lossy(&out.stderr).contains("not continuous"));
}

#[test]
fn check_continuity_both_ways() {
    let fx = Fixtures::new();
    let ok = afpp(&["check", "continuity", &fx.interval, &fx.identity3]);
    assert_eq!(code(&ok), 0);
    assert_eq!(stdout_json(&ok)["result"]["boolean"]["value"], json!(true));

    let torn = afpp(&["check", "continuity", &fx.interval, &fx.torn3]);
    assert_eq!(code(&torn), 10);
    let cert = stdout_json(&torn);
    assert_eq!(cert["result"]["boolean"]["value"], json!(false));
    assert_eq!(cert["details"]["violating_pair"], json!([[1], [2]]));
}

#[test]
fn check_retraction_clamp() {
    let fx = Fixtures::new();
    let out = afpp(&[
        "check",
        "retraction",
        &fx.clamp_domain,
        &fx.clamp_map,
        "--codomain",
        &fx.clamp_codomain,
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(stdout_json(&out)["result"]["boolean"]["value"], json!(true));
}

#[test]
fn enumerate_matches_known_counts() {
    let fx = Fixtures::new();
    let out = afpp(&["enumerate", &fx.interval]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout_json(&out)["result"]["count"]["count"], json!(17));
}

#[test]
fn np_check_subcommands() {
    let fx = Fixtures::new();
    let equals = afpp(&["np-check", "equals", &fx.interval, &fx.interval]);
    assert_eq!(code(&equals), 0);
    assert_eq!(stdout_json(&equals)["result"]["boolean"]["value"], json!(true));

    // A square carrying the partial rule disagrees with the combined grid
    // rule on the product: diagonal hops inside the square are not edges of
    // the factor, but the product's grid rule has them.
    let unequal = afpp(&["np-check", "equals", &fx.square, &fx.interval]);
    assert_eq!(code(&unequal), 10);
    assert_eq!(stdout_json(&unequal)["result"]["boolean"]["value"], json!(false));

    let assoc = afpp(&[
        "np-check",
        "assoc",
        &fx.interval,
        "--cube-dim",
        "2",
        "--side",
        "1",
    ]);
    assert_eq!(code(&assoc), 0);
    assert_eq!(stdout_json(&assoc)["result"]["boolean"]["value"], json!(true));
}

#[test]
fn usage_errors_exit_2() {
    let missing = afpp(&["decide-afpp"]);
    assert_eq!(code(&missing), 2);

    let unknown = afpp(&["frobnicate"]);
    assert_eq!(code(&unknown), 2);

    let fx = Fixtures::new();
    let garbage = write_file(fx.path(), "garbage.json", "not json at all");
    let bad_spec = afpp(&["decide-afpp", &garbage]);
    assert_eq!(code(&bad_spec), 2);

    let help = afpp(&["--help"]);
    assert_eq!(code(&help), 0);
    let version = afpp(&["--version"]);
    assert_eq!(code(&version), 0);
}

#[test]
fn exhausted_budget_exits_20() {
    let fx = Fixtures::new();
    let out = afpp(&["decide-afpp", &fx.square, "--budget-nodes", "1"]);
    assert_eq!(code(&out), 20);
}

#[test]
fn certificates_round_trip_through_verify() {
    let fx = Fixtures::new();
    let cert_path = fx.path().join("square-cert.json");
    let cert_str = cert_path.to_str().expect("utf-8 path");
    let out = afpp(&["decide-afpp", &fx.square, "--output", cert_str]);
    assert_eq!(code(&out), 10);
    // The --output copy is byte-identical to stdout.
    let on_disk = std::fs::read(&cert_path).expect("certificate file");
    assert_eq!(on_disk, out.stdout);

    let verify = afpp(&["verify-certificate", cert_str]);
    assert_eq!(code(&verify), 0, "stderr: {}", String::from_utf8_lossy(&verify.stderr));
    let report = stdout_json(&verify);
    assert_eq!(report["format"], "afpp-verify/1");
    assert_eq!(report["valid"], json!(true));

    // Corrupt the witness table and the verifier must notice.
    let mut tampered: Value = serde_json::from_slice(&on_disk).expect("json");
    tampered["witness"][0][1] = json!([0, 0]);
    let bad_path = fx.path().join("tampered.json");
    std::fs::write(&bad_path, serde_json::to_string_pretty(&tampered).expect("json"))
        .expect("write");
    let verify_bad = afpp(&["verify-certificate", bad_path.to_str().expect("utf-8 path")]);
    assert_eq!(code(&verify_bad), 10);
    assert_eq!(stdout_json(&verify_bad)["valid"], json!(false));
}

#[test]
fn separate_processes_produce_identical_bytes() {
    let fx = Fixtures::new();
    let first = afpp(&["decide-afpp", &fx.square]);
    let second = afpp(&["decide-afpp", &fx.square]);
    assert_eq!(first.stdout, second.stdout);
    assert_eq!(code(&first), code(&second));

    let suite_a = afpp(&["verify-suite", "--scale", "tiny", "--seed", "7"]);
    let suite_b = afpp(&["verify-suite", "--scale", "tiny", "--seed", "7"]);
    assert_eq!(code(&suite_a), 0, "stderr: {}", String::from_utf8_lossy(&suite_a.stderr));
    assert_eq!(suite_a.stdout, suite_b.stdout);
}

#[test]
fn verify_suite_reports_per_criterion_lines() {
    let fx = Fixtures::new();
    let report_path: PathBuf = fx.path().join("suite.json");
    let out = afpp(&[
        "verify-suite",
        "--scale",
        "tiny",
        "--output",
        report_path.to_str().expect("utf-8 path"),
    ]);
    assert_eq!(code(&out), 0);
    let bundle = stdout_json(&out);
    assert_eq!(bundle["format"], "afpp-suite/1");
    assert_eq!(bundle["criteria"].as_array().expect("criteria").len(), 11);
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("11/11 criteria passed"));
    let on_disk = std::fs::read(&report_path).expect("report file");
    assert_eq!(on_disk, out.stdout);
}
