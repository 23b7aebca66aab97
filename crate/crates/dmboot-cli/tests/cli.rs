//! End-to-end tests for the `dmboot` binary: exit codes, determinism,
//! schema stability.

use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dmboot"))
        .args(args)
        .current_dir(env!("CARGO_MANIFEST_DIR"))
        .env("RUST_LOG", "error")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_str(&stdout(out)).expect("valid json on stdout")
}

#[test]
fn ci_asymptotic_on_constant_data_is_degenerate_success() {
    let out = run(&[
        "ci",
        "tests/fixtures/constant.csv",
        "--kernel",
        "variance",
        "--format",
        "json",
    ]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["estimate"], 0.0);
    assert_eq!(v["lower"], 0.0);
    assert_eq!(v["upper"], 0.0);
    assert_eq!(v["degenerate"], true);
}

#[test]
fn ci_bootstrap_is_byte_identical_for_a_seed() {
    let args = [
        "ci",
        "tests/fixtures/uni.csv",
        "--kernel",
        "gini",
        "--method",
        "bootstrap",
        "--M",
        "300",
        "--seed",
        "42",
        "--format",
        "json",
    ];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    // a different seed must change the interval
    let mut other = args;
    other[9] = "43";
    let c = run(&other);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let base = [
        "cp",
        "tests/fixtures/bi.csv",
        "--kernel",
        "kendall",
        "--method",
        "check",
        "--M",
        "250",
        "--seed",
        "5",
        "--format",
        "json",
    ];
    let default_threads = run(&base);
    let mut single = base.to_vec();
    single.extend_from_slice(&["--threads", "1"]);
    let one_thread = run(&single);
    assert!(default_threads.status.success());
    assert_eq!(default_threads.stdout, one_thread.stdout);
}

#[test]
fn cp_output_is_invariant_under_monotone_margin_transforms() {
    let result = |input: &str| {
        let out = run(&[
            "cp",
            input,
            "--kernel",
            "kendall",
            "--method",
            "check",
            "--M",
            "300",
            "--seed",
            "9",
            "--format",
            "json",
        ]);
        assert!(out.status.success());
        let v = json(&out);
        (v["statistic"].clone(), v["p_value"].clone(), v["change_point"].clone())
    };
    assert_eq!(
        result("tests/fixtures/bi.csv"),
        result("tests/fixtures/bi_warped.csv")
    );
}

#[test]
fn kendall_kernel_rejects_univariate_input() {
    let out = run(&["ci", "tests/fixtures/uni.csv", "--kernel", "kendall"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("kendall"));
}

#[test]
fn ragged_csv_reports_the_line_number() {
    let out = run(&["cp", "tests/fixtures/ragged.csv", "--kernel", "variance"]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr(&out);
    assert!(err.contains("line 3"), "stderr: {err}");
}

#[test]
fn missing_file_and_bad_flags_exit_2() {
    let out = run(&["ci", "tests/fixtures/nope.csv", "--kernel", "variance"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["ci", "tests/fixtures/uni.csv", "--kernel", "sausage"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&[
        "simulate", "coverage", "--n", "32", "--reps", "0", "--seed", "1",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn omitted_seed_is_drawn_and_reported() {
    let out = run(&[
        "cp",
        "tests/fixtures/uni.csv",
        "--kernel",
        "variance",
        "--method",
        "hat",
        "--M",
        "150",
        "--format",
        "json",
    ]);
    assert!(out.status.success());
    let v = json(&out);
    assert!(v["seed"].is_u64());
}

#[test]
fn ell_override_bypasses_bandwidth_estimation() {
    let out = run(&[
        "ci",
        "tests/fixtures/uni.csv",
        "--kernel",
        "variance",
        "--ell",
        "7",
        "--format",
        "json",
    ]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["ell"], 7);
    assert_eq!(v["ell_source"], "override");
    assert!(v["bandwidth"].is_null());
}

#[test]
fn csv_format_emits_header_and_one_row() {
    let out = run(&[
        "ci",
        "tests/fixtures/uni.csv",
        "--kernel",
        "variance",
        "--format",
        "csv",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    let lines: Vec<&str> = text.trim_end().lines().collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[0].starts_with("command,kernel,method,alpha"));
    assert!(lines[1].starts_with("ci,variance,asymptotic"));
}

#[test]
fn output_flag_writes_the_report_to_a_file() {
    let dir = std::env::temp_dir().join("dmboot-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("report.json");
    let out = run(&[
        "cp",
        "tests/fixtures/bi.csv",
        "--kernel",
        "kendall",
        "--M",
        "120",
        "--seed",
        "3",
        "--format",
        "json",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(stdout(&out).is_empty());
    let body = std::fs::read_to_string(&path).unwrap();
    let v: serde_json::Value = serde_json::from_str(&body).unwrap();
    assert_eq!(v["command"], "cp");
    std::fs::remove_file(&path).ok();
}

#[test]
fn simulate_json_has_versioned_schema_and_rows() {
    let out = run(&[
        "simulate",
        "cplevel",
        "--copula",
        "clayton",
        "--tau",
        "0.3",
        "--n",
        "32,48",
        "--reps",
        "4",
        "--M",
        "80",
        "--seed",
        "12",
        "--format",
        "json",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let v = json(&out);
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["mode"], "cplevel");
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0]["n"], 32);
    assert_eq!(rows[1]["n"], 48);
    let methods = rows[0]["methods"].as_array().unwrap();
    let names: Vec<&str> = methods
        .iter()
        .map(|m| m["method"].as_str().unwrap())
        .collect();
    assert_eq!(names, ["cp_check", "cp_hat", "cp_asymptotic"]);
}

/// Golden files pin the JSON schemas (and, for this toolchain, the exact
/// values). Regenerate with the commands in the file headers if the report
/// format legitimately changes.
#[test]
fn golden_json_reports() {
    for (golden, args) in [
        (
            "tests/golden/ci_bootstrap.json",
            vec![
                "ci",
                "tests/fixtures/uni.csv",
                "--kernel",
                "variance",
                "--method",
                "bootstrap",
                "--M",
                "200",
                "--seed",
                "11",
                "--format",
                "json",
            ],
        ),
        (
            "tests/golden/cp_check.json",
            vec![
                "cp",
                "tests/fixtures/bi.csv",
                "--kernel",
                "kendall",
                "--method",
                "check",
                "--M",
                "200",
                "--seed",
                "11",
                "--format",
                "json",
            ],
        ),
    ] {
        let out = run(&args);
        assert!(out.status.success());
        let got: serde_json::Value = json(&out);
        let want: serde_json::Value = serde_json::from_str(
            &std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join(golden))
                .unwrap_or_else(|e| panic!("missing golden {golden}: {e}")),
        )
        .unwrap();
        assert_eq!(got, want, "golden mismatch for {golden}");
    }
}
