//! End-to-end runs of the installed binary: output shapes, exit codes,
//! determinism.

use fibpart::golden::{parse_int_grid, MATRIX_20X20};
use fibpart::perm::builtin;
use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fibpart"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf8 stdout")
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("utf8 stderr")
}

#[test]
fn the_worked_example_matrix_prints_exactly() {
    let out = run(&["mex", "gen", "--rows", "4", "--cols", "4"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "0 0 0 0\n0 1 2 3\n0 2 1 5\n0 3 5 1\n");
}

#[test]
fn the_twenty_by_twenty_csv_matches_the_stored_grid() {
    let out = run(&["mex", "gen", "--rows", "20", "--cols", "20", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let got: Vec<Vec<i64>> = stdout(&out)
        .lines()
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    assert_eq!(got, parse_int_grid(MATRIX_20X20).unwrap());
}

#[test]
fn permutation_values_match_the_library() {
    let out = run(&["perm", "eval", "--name", "f", "--upto", "20", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let f = builtin("f").unwrap();
    for (line, n) in stdout(&out).lines().skip(1).zip(1i128..) {
        let (idx, value) = line.split_once(',').unwrap();
        assert_eq!(idx.parse::<i128>().unwrap(), n);
        assert_eq!(value.parse::<i128>().unwrap(), f.eval(n).unwrap());
    }
}

#[test]
fn exit_codes_follow_the_contract() {
    let pass = run(&["identity", "--claim", "a(b(n)) - b(n) = a(n)", "--upto", "200"]);
    assert_eq!(pass.status.code(), Some(0));

    let fail = run(&["identity", "--claim", "a(n)*2 = b(n)", "--upto", "50"]);
    assert_eq!(fail.status.code(), Some(1));
    assert!(stdout(&fail).contains("FAIL"));

    let unknown_flag = run(&["mex", "gen", "--wat", "3"]);
    assert_eq!(unknown_flag.status.code(), Some(2));
    assert!(stderr(&unknown_flag).contains("--wat"));

    let bad_value = run(&["perm", "eval", "--name", "nope"]);
    assert_eq!(bad_value.status.code(), Some(2));
    assert!(stderr(&bad_value).contains("--name"));

    let missing_selector = run(&["perm", "eval"]);
    assert_eq!(missing_selector.status.code(), Some(2));
    assert!(stderr(&missing_selector).contains("--name or --tuples"));
}

#[test]
fn malformed_block_lists_are_usage_errors() {
    let out = run(&["partition", "--blocks", "garbage", "--upto", "50"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("--blocks"));

    // parseable but not a partition: a verification failure, not usage
    let out = run(&["partition", "--blocks", "(1,0);(1,0)", "--upto", "50"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn exported_plot_data_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("row2.csv");
    let direct = run(&["mex", "export", "--row", "2", "--cols", "25"]);
    assert_eq!(direct.status.code(), Some(0));
    let to_file = run(&[
        "mex", "export", "--row", "2", "--cols", "25", "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(to_file.status.code(), Some(0));
    assert_eq!(stdout(&to_file), "");
    assert_eq!(std::fs::read_to_string(&path).unwrap(), stdout(&direct));

    let grid = parse_int_grid(MATRIX_20X20).unwrap();
    let parsed: Vec<(usize, i64)> = stdout(&direct)
        .lines()
        .skip(1)
        .map(|l| {
            let (j, q) = l.split_once(',').unwrap();
            (j.parse().unwrap(), q.parse().unwrap())
        })
        .collect();
    assert_eq!(parsed.len(), 25);
    for &(j, q) in parsed.iter().take(20) {
        assert_eq!(q, grid[2][j]);
    }

    let zeros = run(&["mex", "export", "--row", "0", "--cols", "30"]);
    for line in stdout(&zeros).lines().skip(1) {
        assert!(line.ends_with(",0"));
    }
}

#[test]
fn json_reports_parse() {
    let out = run(&["oa", "verify", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let value: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(value["lambda"], 1);
    assert_eq!(value["violation_count"], 0);

    let out = run(&["mex", "row2", "--cols", "800", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let value: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(value["diff_radius"].as_i64().unwrap() > 0);
}

#[test]
fn reproduction_scripts_report_pass_lines() {
    for name in ["matrix-20", "oa-4-3", "avoided-sets"] {
        let out = run(&["repro", name]);
        assert_eq!(out.status.code(), Some(0), "{name} failed");
        let text = stdout(&out);
        assert!(text.contains(&format!("{name}: PASS")), "{name}: {text}");
    }
    let out = run(&["repro", "oeis", "--min-terms", "50"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("oeis: PASS"));
}

#[test]
fn dm_verification_reads_grid_files() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("good.txt");
    std::fs::write(&good, "0 0 0\n0 1 2\n0 2 1\n").unwrap();
    let out = run(&["dm", "verify", "--file", good.to_str().unwrap(), "--modulus", "3"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("difference property holds"));

    let bad = dir.path().join("bad.txt");
    std::fs::write(&bad, "0 0 0\n0 1 2\n0 2 2\n").unwrap();
    let out = run(&["dm", "verify", "--file", bad.to_str().unwrap(), "--modulus", "3"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("FAIL"));

    let missing = dir.path().join("absent.txt");
    let out = run(&["dm", "verify", "--file", missing.to_str().unwrap(), "--modulus", "3"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("--file"));
}

#[test]
fn clustering_output_is_deterministic() {
    let args = [
        "cluster", "--row", "2", "--cols", "2500", "--window", "900", "--kmax", "4",
        "--seed", "7",
    ];
    let first = run(&args);
    let second = run(&args);
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(stdout(&first), stdout(&second));

    let points = run(&[
        "cluster", "--row", "2", "--cols", "2500", "--window", "900", "--k", "2", "--points",
    ]);
    let text = stdout(&points);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("j,slope,cluster"));
    assert_eq!(lines.count(), 900);
}

#[test]
fn a_bogus_cache_directory_does_not_break_builtin_lookups() {
    let out = Command::new(env!("CARGO_BIN_EXE_fibpart"))
        .args(["oeis", "check", "--id", "A000201"])
        .env("FIBPART_OEIS_CACHE", Path::new("/nonexistent/cache/dir"))
        .output()
        .expect("binary runs");
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("pass  A000201"));
}

#[test]
fn thread_pool_flag_is_accepted() {
    let out = run(&["identity", "--upto", "150", "--threads", "1"]);
    assert_eq!(out.status.code(), Some(0));

    let out = run(&["identity", "--upto", "10", "--threads", "0"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("--threads"));
}
