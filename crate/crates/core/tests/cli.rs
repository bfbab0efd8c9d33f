use std::path::Path;
use std::process::{Command, Output};

use primes_lab::report::{parse_series_csv, SERIES_HEADER};

fn lab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_primes-lab"))
        .args(args)
        .env_remove("PRIMES_LAB_MAX_LIMIT")
        .output()
        .expect("run primes-lab")
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn monoid_summary_csv_matches_table_row() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("out.csv");
    let out = lab(&["monoid", "--d", "3", "--limit", "10000", "--eval-at", "largest", "--csv", path_str(&csv)]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "d,largest_element,actual_count,estimate,R_d,abs_R_minus_1,mape_pct");
    assert!(lines[1].starts_with("3,10000,1380,1590.21,0.86781,0.13219,"), "{}", lines[1]);
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("wrote summary CSV"));
}

#[test]
fn eval_at_limit_differs_from_largest_element() {
    let at_limit = String::from_utf8(lab(&["monoid", "--d", "5", "--limit", "10000"]).stdout).unwrap();
    let at_largest =
        String::from_utf8(lab(&["monoid", "--d", "5", "--limit", "10000", "--eval-at", "largest"]).stdout).unwrap();
    assert!(at_limit.contains("estimate=1282.85"), "{at_limit}");
    assert!(at_largest.contains("estimate=1282.34"), "{at_largest}");
}

#[test]
fn series_csv_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("series.csv");
    let out = lab(&["monoid", "--d", "7", "--limit", "5000", "--series-csv", path_str(&csv)]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with(SERIES_HEADER));
    let points = parse_series_csv(&text).unwrap();
    assert_eq!(points.first().unwrap().x, 8);
    for p in &points {
        assert_eq!(p.x % 7, 1);
        assert!((p.ratio * p.estimate - p.actual as f64).abs() <= 1e-4 * p.actual as f64 + 1e-4);
    }
}

#[test]
fn argument_errors_exit_two() {
    let out = lab(&["monoid", "--d", "1", "--limit", "100"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());

    let out = lab(&["quad", "--d", "-7", "--bound", "100"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("infinitely many units"));

    assert_eq!(lab(&["quad", "--d", "4", "--bound", "100"]).status.code(), Some(2));
    assert_eq!(lab(&["gauss"]).status.code(), Some(2));
    assert_eq!(lab(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn resource_guard_exits_three_and_env_raises_it() {
    let args = ["monoid", "--d", "1000", "--limit", "200000000"];
    assert_eq!(lab(&args).status.code(), Some(3));
    let raised = Command::new(env!("CARGO_BIN_EXE_primes-lab"))
        .args(args)
        .env("PRIMES_LAB_MAX_LIMIT", "300000000")
        .output()
        .unwrap();
    assert_eq!(raised.status.code(), Some(0), "{}", String::from_utf8_lossy(&raised.stderr));
}

#[test]
fn unwritable_output_exits_four() {
    let out = lab(&["gauss", "--norm-limit", "100", "--csv", "/definitely/not/here.csv"]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn gauss_and_quad_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("g.csv");
    let svg = dir.path().join("g.svg");
    let out = lab(&["gauss", "--norm-limit", "10", "--csv", path_str(&csv), "--svg", path_str(&svg)]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8(out.stdout).unwrap().contains("pi_G=5"));
    let rows = parse_series_csv(&std::fs::read_to_string(&csv).unwrap()).unwrap();
    assert_eq!(rows.last().unwrap().actual, 5);
    assert!(std::fs::read_to_string(&svg).unwrap().contains("<polyline"));

    let dedupe = lab(&["gauss", "--norm-limit", "10", "--dedupe-axes"]);
    assert!(String::from_utf8(dedupe.stdout).unwrap().contains("pi_G=4"));

    let quad = lab(&["quad", "--d", "5", "--bound", "6"]);
    assert_eq!(quad.status.code(), Some(0));
    assert!(String::from_utf8(quad.stdout).unwrap().contains("irreducibles=3"));

    let quad_e = lab(&["quad", "--d", "2", "--bound", "50", "--region", "euclidean"]);
    assert_eq!(quad_e.status.code(), Some(0));
}

#[test]
fn fit_subcommand_reports_parameters() {
    let out = lab(&["fit", "--domain", "classical", "--limit", "100000", "--from", "1000"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let e: f64 = text
        .split_whitespace()
        .find_map(|w| w.strip_prefix("e="))
        .unwrap()
        .parse()
        .unwrap();
    assert!((0.8..=1.2).contains(&e), "{text}");

    assert_eq!(lab(&["fit", "--domain", "monoid", "--limit", "1000"]).status.code(), Some(2));
    assert_eq!(lab(&["fit", "--domain", "quad", "--d", "5", "--limit", "20000"]).status.code(), Some(0));
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for i in 0..2 {
        let csv = dir.path().join(format!("s{i}.csv"));
        let svg = dir.path().join(format!("s{i}.svg"));
        let out = lab(&["monoid", "--d", "13", "--limit", "30000", "--series-csv", path_str(&csv), "--svg", path_str(&svg)]);
        assert_eq!(out.status.code(), Some(0));
        outputs.push((std::fs::read(&csv).unwrap(), std::fs::read(&svg).unwrap()));
    }
    assert_eq!(outputs[0], outputs[1]);
}
