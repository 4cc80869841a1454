//! End-to-end tests of the `shrinkreg` binary: config handling, output
//! shapes, determinism and failure modes.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn run_cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_shrinkreg"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path.to_string_lossy().into_owned()
}

/// errors.csv with the volatile runtime column removed.
fn canonical_errors(dir: &Path) -> String {
    let text = fs::read_to_string(dir.join("errors.csv")).unwrap();
    text.lines()
        .map(|line| {
            let fields: Vec<&str> = line.split(',').collect();
            let mut kept = fields.clone();
            kept.remove(5); // runtime_ms
            kept.join(",")
        })
        .collect::<Vec<_>>()
        .join("\n")
}

const TINY_CONFIG: &str = r#"
command = "simulate"

[problem]
kind = "compressed-sensing"
d = 4

[noise]
family = "gaussian"
sigma2 = 0.25

[sweep]
n_grid = [60, 90]
replications = 2
seed = 7

[target]
rank = 2

[solver]
tol = 1e-5
max_iter = 3000
"#;

#[test]
fn simulate_writes_complete_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(tmp.path(), "run.toml", TINY_CONFIG);
    let out = tmp.path().join("run");
    let result = run_cli(&["simulate", "--config", &config, "--out", out.to_str().unwrap()]);
    assert!(result.status.success(), "{}", String::from_utf8_lossy(&result.stderr));

    let errors = fs::read_to_string(out.join("errors.csv")).unwrap();
    let mut lines = errors.lines();
    assert_eq!(
        lines.next().unwrap(),
        "d,n,replication,method,frobenius_error,runtime_ms,converged"
    );
    // |grid| x replications x methods data rows
    assert_eq!(lines.count(), 2 * 2 * 2);

    let summary = fs::read_to_string(out.join("summary.csv")).unwrap();
    assert!(summary.starts_with("d,n,method,median_error"));
    assert_eq!(summary.lines().count(), 1 + 2 * 2);

    let meta = fs::read_to_string(out.join("meta.txt")).unwrap();
    assert!(meta.contains("rng = ChaCha12"));
    assert!(meta.contains("seed = 7"));
    assert!(meta.contains("robust.lambda"));
    assert!(meta.contains("solver = tol"));
}

#[test]
fn reruns_are_deterministic_modulo_runtime() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(tmp.path(), "run.toml", TINY_CONFIG);
    let out_a = tmp.path().join("a");
    let out_b = tmp.path().join("b");
    for out in [&out_a, &out_b] {
        let result =
            run_cli(&["simulate", "--config", &config, "--out", out.to_str().unwrap()]);
        assert!(result.status.success());
    }
    assert_eq!(canonical_errors(&out_a), canonical_errors(&out_b));
    let summary_a = fs::read_to_string(out_a.join("summary.csv")).unwrap();
    let summary_b = fs::read_to_string(out_b.join("summary.csv")).unwrap();
    assert_eq!(summary_a, summary_b);
    let meta_a = fs::read_to_string(out_a.join("meta.txt")).unwrap();
    let meta_b = fs::read_to_string(out_b.join("meta.txt")).unwrap();
    assert_eq!(meta_a, meta_b);
}

#[test]
fn fit_runs_one_replication_at_one_grid_point() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(tmp.path(), "run.toml", TINY_CONFIG);
    let out = tmp.path().join("fit");
    let result = run_cli(&[
        "fit",
        "--config",
        &config,
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(result.status.success(), "{}", String::from_utf8_lossy(&result.stderr));
    let errors = fs::read_to_string(out.join("errors.csv")).unwrap();
    assert_eq!(errors.lines().count(), 1 + 2); // header + robust + standard
}

#[test]
fn minimal_preset_config_resolves_with_defaults() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(
        tmp.path(),
        "run.toml",
        "command = \"simulate\"\npreset = \"figure2-lognormal\"\n",
    );
    let out = tmp.path().join("preset");
    // shrink the run so the test stays fast; flag overrides are part of
    // the contract under test
    let result = run_cli(&[
        "simulate",
        "--config",
        &config,
        "--out",
        out.to_str().unwrap(),
        "--reps",
        "1",
    ]);
    assert!(result.status.success(), "{}", String::from_utf8_lossy(&result.stderr));
    let meta = fs::read_to_string(out.join("meta.txt")).unwrap();
    assert!(meta.contains("preset = figure2-lognormal"));
    assert!(meta.contains("log-normal sigma2=6.25 divisor=50"));
    let errors = fs::read_to_string(out.join("errors.csv")).unwrap();
    assert_eq!(errors.lines().count(), 1 + 3 * 2); // three grid points, 1 rep, 2 methods
}

#[test]
fn negative_replications_name_the_key() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(
        tmp.path(),
        "bad.toml",
        "command = \"simulate\"\npreset = \"figure2-gaussian\"\n[sweep]\nreplications = -3\n",
    );
    let out = tmp.path().join("x");
    let result = run_cli(&["simulate", "--config", &config, "--out", out.to_str().unwrap()]);
    assert!(!result.status.success());
    let stderr = String::from_utf8_lossy(&result.stderr);
    assert!(stderr.contains("replications"), "stderr: {stderr}");
}

#[test]
fn unknown_keys_are_rejected_with_location() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(
        tmp.path(),
        "bad.toml",
        "command = \"simulate\"\npreset = \"figure2-gaussian\"\nbogus_key = 1\n",
    );
    let out = tmp.path().join("x");
    let result = run_cli(&["simulate", "--config", &config, "--out", out.to_str().unwrap()]);
    assert!(!result.status.success());
    let stderr = String::from_utf8_lossy(&result.stderr);
    assert!(stderr.contains("bogus_key"), "stderr: {stderr}");
    assert!(stderr.contains("line 3"), "stderr: {stderr}");
}

#[test]
fn covariance_bench_writes_spectral_errors() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(
        tmp.path(),
        "cov.toml",
        r#"
command = "covariance-bench"

[covariance]
ratios = [0.5]
law = "t3"

[sweep]
n_grid = [20, 30]
replications = 2
seed = 3
"#,
    );
    let out = tmp.path().join("cov");
    let result =
        run_cli(&["covariance-bench", "--config", &config, "--out", out.to_str().unwrap()]);
    assert!(result.status.success(), "{}", String::from_utf8_lossy(&result.stderr));
    let errors = fs::read_to_string(out.join("errors.csv")).unwrap();
    assert!(errors.starts_with("d,n,replication,method,spectral_error,runtime_ms,converged"));
    assert_eq!(errors.lines().count(), 1 + 2 * 2 * 2);
}

#[test]
fn figure5_preset_covers_the_section_grid() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("f5");
    let result = run_cli(&[
        "covariance-bench",
        "--preset",
        "figure5-gaussian",
        "--out",
        out.to_str().unwrap(),
        "--reps",
        "1",
    ]);
    assert!(result.status.success(), "{}", String::from_utf8_lossy(&result.stderr));
    let errors = fs::read_to_string(out.join("errors.csv")).unwrap();
    // ratios {0.2, 0.5, 1.0} x n {100..500} x 1 rep x 2 methods
    assert_eq!(errors.lines().count(), 1 + 3 * 5 * 2);
    let meta = fs::read_to_string(out.join("meta.txt")).unwrap();
    assert!(meta.contains("d/n 0.2"));
    assert!(meta.contains("d/n 0.5"));
    assert!(meta.contains("d/n 1"));
    assert!(meta.contains("n_grid [100, 200, 300, 400, 500]"));
}

#[test]
fn mismatched_command_and_config_fail() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(
        tmp.path(),
        "sim.toml",
        "command = \"simulate\"\npreset = \"figure2-gaussian\"\n",
    );
    let out = tmp.path().join("x");
    let result =
        run_cli(&["covariance-bench", "--config", &config, "--out", out.to_str().unwrap()]);
    assert!(!result.status.success());
}

#[test]
fn flag_overrides_reach_the_metadata() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(tmp.path(), "run.toml", TINY_CONFIG);
    let out = tmp.path().join("o");
    let result = run_cli(&[
        "simulate",
        "--config",
        &config,
        "--out",
        out.to_str().unwrap(),
        "--seed",
        "99",
        "--tau-const",
        "2.5",
        "--lambda-const",
        "0.7",
        "--delta",
        "2.0",
        "--jobs",
        "1",
    ]);
    assert!(result.status.success(), "{}", String::from_utf8_lossy(&result.stderr));
    let meta = fs::read_to_string(out.join("meta.txt")).unwrap();
    assert!(meta.contains("seed = 99"));
    assert!(meta.contains("constant=2.5"));
    assert!(meta.contains("constant=0.7"));
    assert!(meta.contains("delta=2"));
    assert!(meta.contains("jobs = 1"));
}
