//! End-to-end tests of the command-line interface, driven through the
//! compiled binary.

use std::collections::HashMap;
use std::process::{Command, Output};

fn priorgap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_priorgap"))
        .args(args)
        .output()
        .expect("failed to launch the binary")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("stdout was not utf-8")
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("stderr was not utf-8")
}

/// Parse a single porcelain line of space-separated key=value pairs.
fn porcelain(line: &str) -> HashMap<String, String> {
    line.trim()
        .split(' ')
        .map(|pair| {
            let (k, v) = pair.split_once('=').expect("porcelain token without '='");
            (k.to_string(), v.to_string())
        })
        .collect()
}

#[test]
fn bounds_reports_the_worked_normal_variance_case() {
    let out = priorgap(&[
        "bounds",
        "--model",
        "normal-variance",
        "--n",
        "10",
        "--s",
        "10",
        "--alpha",
        "1",
        "--beta",
        "1",
        "--porcelain",
    ]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let kv = porcelain(&stdout(&out));
    assert_eq!(kv["lower"], "0.05");
    assert_eq!(kv["upper"], "0.55");
    assert_eq!(kv["exact"], "false");
    let sup: f64 = kv["upper_supnorm"].parse().expect("sup-norm should be numeric");
    assert!(sup > 0.0, "sup-norm bound should be positive, got {sup}");
    assert!(!kv.contains_key("distance"), "non-monotone case has no exact distance");
}

#[test]
fn bounds_reports_the_monotone_poisson_distance() {
    let out = priorgap(&[
        "bounds",
        "--model",
        "poisson",
        "--n",
        "4",
        "--sum-x",
        "6",
        "--a1",
        "1",
        "--b1",
        "0",
        "--a2",
        "0.5",
        "--b2",
        "1",
        "--porcelain",
    ]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let kv = porcelain(&stdout(&out));
    assert_eq!(kv["exact"], "true");
    assert_eq!(kv["distance"], "0.45");
    assert_eq!(kv["lower"], "0.45");
    assert_eq!(kv["upper"], "0.45");
}

#[test]
fn verify_passes_the_worked_binomial_case() {
    let out = priorgap(&[
        "verify",
        "--model",
        "binomial",
        "--n",
        "10",
        "--successes",
        "3",
        "--alpha",
        "2",
        "--beta",
        "2",
        "--porcelain",
    ]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let kv = porcelain(&stdout(&out));
    assert_eq!(kv["sandwich"], "pass");
    let oracle: f64 = kv["oracle"].parse().unwrap();
    assert!(
        (0.0571428..=0.2).contains(&oracle),
        "oracle {oracle} outside the closed-form bracket"
    );
    let closed_upper: f64 = kv["closed_upper"].parse().unwrap();
    let engine_upper: f64 = kv["engine_upper"].parse().unwrap();
    assert!(engine_upper <= closed_upper);
}

#[test]
fn verify_handles_identical_priors() {
    let out = priorgap(&[
        "verify",
        "--model",
        "normal-variance",
        "--n",
        "10",
        "--s",
        "10",
        "--alpha",
        "0",
        "--beta",
        "0",
        "--porcelain",
    ]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let kv = porcelain(&stdout(&out));
    assert_eq!(kv["sandwich"], "pass");
    let oracle: f64 = kv["oracle"].parse().unwrap();
    assert!(oracle.abs() <= 1e-9, "oracle should vanish, got {oracle}");
}

#[test]
fn invalid_cases_exit_with_code_one_and_name_the_condition() {
    let out = priorgap(&[
        "bounds",
        "--model",
        "binomial",
        "--n",
        "10",
        "--successes",
        "0",
        "--alpha",
        "1",
        "--beta",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let err = stderr(&out);
    assert!(
        err.contains("interior success count"),
        "error should name the violated condition, got: {err}"
    );

    let missing = priorgap(&["bounds", "--model", "poisson", "--n", "4", "--sum-x", "6"]);
    assert_eq!(missing.status.code(), Some(1));
    assert!(stderr(&missing).contains("poisson requires"));

    let usage = priorgap(&["bounds", "--model", "unknown", "--n", "3"]);
    assert_eq!(usage.status.code(), Some(1));
}

#[test]
fn sweep_writes_csv_to_a_file_and_slopes_to_stdout() {
    let dir = std::env::temp_dir().join(format!("priorgap-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let csv_path = dir.join("sweep.csv");

    let out = priorgap(&[
        "sweep",
        "--model",
        "poisson",
        "--a1",
        "0.5",
        "--b1",
        "0",
        "--a2",
        "0.5",
        "--b2",
        "1",
        "--true-param",
        "2",
        "--n-grid",
        "10,32,100,316",
        "--replicates",
        "2",
        "--seed",
        "7",
        "--out",
        csv_path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));

    let csv = std::fs::read_to_string(&csv_path).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "model,n,replicate,seed,sum_x,centered_sq_sum,successes,lower,upper,upper_supnorm,oracle,exact"
    );
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 4 * 2, "one row per (n, replicate)");
    for row in &rows {
        assert!(row.starts_with("poisson,"));
        assert!(row.ends_with(",true"), "monotone tilt rows must be exact: {row}");
    }

    // Slopes land on stdout when the CSV goes to a file.
    let slopes = stdout(&out);
    for key in ["slope_lower=", "slope_upper=", "slope_oracle="] {
        assert!(slopes.contains(key), "missing {key} in: {slopes}");
    }
    let slope_upper: f64 = slopes
        .lines()
        .find_map(|l| l.strip_prefix("slope_upper="))
        .unwrap()
        .parse()
        .unwrap();
    assert!(
        (-1.35..=-0.65).contains(&slope_upper),
        "slope {slope_upper} far from -1"
    );

    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn sweep_reports_unfittable_slopes_gracefully() {
    let out = priorgap(&[
        "sweep",
        "--model",
        "normal-variance",
        "--alpha",
        "0",
        "--beta",
        "0",
        "--true-param",
        "1",
        "--n-grid",
        "10,32,100,316",
        "--replicates",
        "1",
        "--seed",
        "5",
    ]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    // CSV on stdout, slope report on stderr.
    let csv = stdout(&out);
    assert!(csv.starts_with("model,n,replicate,seed,"));
    let err = stderr(&out);
    assert!(
        err.contains("slope_upper=unavailable"),
        "zero columns should yield a named fit error, got: {err}"
    );
    assert!(err.contains("non-positive"));
}
