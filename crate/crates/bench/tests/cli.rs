use std::fs;
use std::path::Path;

use graal_bench::cli::{main_with, EXIT_CONFIG, EXIT_IO, EXIT_OK};

fn cli(args: &[&str]) -> u8 {
    main_with(std::iter::once("graal-bench").chain(args.iter().copied()))
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path.display().to_string()
}

const SMALL: &str = "\
experiment.name = small
problem.family = nash
problem.scenario = a
problem.n = 5
problem.seeds = 1..2
method.names = agraal, fbf
stop.tol = 1e-6
stop.max_iters = 5000
";

#[test]
fn list_problems_succeeds() {
    assert_eq!(cli(&["list-problems"]), EXIT_OK);
}

#[test]
fn validate_config_accepts_presets_and_rejects_bad_phi() {
    assert_eq!(cli(&["validate-config", "--preset", "nash-a"]), EXIT_OK);
    assert_eq!(cli(&["validate-config", "--preset", "no-such-preset"]), EXIT_CONFIG);

    let dir = tempfile::tempdir().unwrap();
    let good = write_config(dir.path(), "good.cfg", SMALL);
    assert_eq!(cli(&["validate-config", &good]), EXIT_OK);
    let bad = write_config(dir.path(), "bad.cfg", &format!("{SMALL}method.phi = 2\n"));
    assert_eq!(cli(&["validate-config", &bad]), EXIT_CONFIG);
    let unknown = write_config(dir.path(), "unknown.cfg", &format!("{SMALL}method.colour = red\n"));
    assert_eq!(cli(&["validate-config", &unknown]), EXIT_CONFIG);
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(cli(&["frobnicate"]), EXIT_CONFIG);
    assert_eq!(cli(&["solve", "--problem", "nash"]), EXIT_CONFIG);
    assert_eq!(cli(&["solve", "--problem", "nash", "--method", "graal"]), EXIT_CONFIG);
}

#[test]
fn missing_data_file_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let data = dir.path().join("missing.svm");
    let code = cli(&[
        "solve",
        "--problem",
        "logistic",
        "--method",
        "agraal",
        "--data",
        data.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, EXIT_IO);
}

#[test]
fn solve_writes_a_trace_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let code = cli(&["solve", "--problem", "nash", "--scenario", "b", "--n", "6", "--method", "agraal", "--out", out]);
    assert_eq!(code, EXIT_OK);
    let trace = fs::read_to_string(dir.path().join("nash-agraal_agraal_seed0.csv")).unwrap();
    assert!(trace.lines().count() > 2);
    let summary = fs::read_to_string(dir.path().join("nash-agraal_summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), 2);
}

#[test]
fn bench_outputs_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "small.cfg", SMALL);
    let (first, second) = (dir.path().join("first"), dir.path().join("second"));
    assert_eq!(cli(&["bench", &config, "--out", first.to_str().unwrap()]), EXIT_OK);
    assert_eq!(cli(&["bench", &config, "--out", second.to_str().unwrap(), "--workers", "1"]), EXIT_OK);
    let mut names: Vec<_> = fs::read_dir(&first).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert_eq!(names.len(), 5, "four traces and a summary");
    for name in names {
        assert_eq!(fs::read(first.join(&name)).unwrap(), fs::read(second.join(&name)).unwrap(), "{name:?}");
    }
}
