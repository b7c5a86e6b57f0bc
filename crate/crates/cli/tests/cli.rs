//! Behavior of the installed binary: output shapes, exit codes, round-trips.

use std::path::{Path, PathBuf};
use std::process::Command;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

fn fixture_str(name: &str) -> String {
    fixture(name).to_str().expect("fixture path is UTF-8").to_string()
}

fn run(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_haardual"))
        .args(args)
        .output()
        .expect("binary spawns");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

fn field(report: &str, prefix: &str) -> String {
    report
        .lines()
        .find_map(|l| l.strip_prefix(prefix))
        .unwrap_or_else(|| panic!("no '{prefix}' line in:\n{report}"))
        .trim()
        .to_string()
}

#[test]
fn oracle_reports_the_band_value() {
    let (code, out, _) = run(&["oracle", &fixture_str("interval_quadratic.json"), "--grid", "1001"]);
    assert_eq!(code, 0);
    let value: f64 = field(&out, "value:").parse().unwrap();
    assert!((value - 0.5).abs() <= 1e-6, "grid value {value}");
    assert!(out.contains("caveat:"), "missing the sampling caveat");
}

#[test]
fn dual_h1_reports_value_index_and_multiplier() {
    let (code, out, _) = run(&[
        "dual",
        &fixture_str("interval_quadratic.json"),
        "--family",
        "h1",
        "--grid",
        "1001",
        "--refine",
    ]);
    assert_eq!(code, 0);
    let value: f64 = field(&out, "value:").parse().unwrap();
    let index: f64 = field(&out, "best index:").parse().unwrap();
    assert!((value - 0.5).abs() <= 1e-6, "dual value {value}");
    assert!((index - 0.5).abs() <= 1e-6, "best index {index}");
    let lambda: f64 = out
        .lines()
        .find(|l| l.trim_start().starts_with("index ") && l.contains("lambda"))
        .and_then(|l| l.split_whitespace().last())
        .expect("support line")
        .parse()
        .unwrap();
    assert!((lambda - 2.0).abs() <= 1e-6, "multiplier {lambda}");
}

#[test]
fn trace_prints_stable_csv() {
    let (code, out, _) = run(&["trace", &fixture_str("countable_divergent.json"), "--max-m", "50"]);
    assert_eq!(code, 0);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("m,primal,dual"));
    for (i, line) in lines.enumerate() {
        assert_eq!(line, format!("{},-inf,-inf", i + 1));
    }
    assert_eq!(out.lines().count(), 51);
}

#[test]
fn trace_writes_the_csv_to_a_file() {
    let dest = std::env::temp_dir().join(format!("haardual-trace-{}.csv", std::process::id()));
    let dest_str = dest.to_str().unwrap().to_string();
    let (code, out, _) = run(&[
        "trace",
        &fixture_str("countable_divergent.json"),
        "--max-m",
        "5",
        "--out",
        &dest_str,
    ]);
    assert_eq!(code, 0);
    assert!(out.contains("wrote 5 rows"));
    let csv = std::fs::read_to_string(&dest).expect("trace file exists");
    assert!(csv.starts_with("m,primal,dual\n1,-inf,-inf\n"));
    assert_eq!(csv.lines().count(), 6);
    let _ = std::fs::remove_file(&dest);
}

#[test]
fn trace_needs_an_enumerable_index_set() {
    let (code, _, err) = run(&["trace", &fixture_str("interval_quadratic.json"), "--max-m", "5"]);
    assert_eq!(code, 2);
    assert!(err.contains("error:"), "stderr: {err}");
}

#[test]
fn check_flags_the_divergent_instance() {
    let (code, out, _) = run(&["check", &fixture_str("countable_divergent.json")]);
    assert_eq!(code, 1, "requested family is not guaranteed, so exit 1");
    assert!(out.contains("recession cone is a subspace: no"));
    assert!(out.contains("lifted generator cone is pointed with one half-line: no"));
    assert!(out.contains("gap: indeterminate"));
    assert!(!out.contains("gap: 0"));
    assert!(out.contains("caveat:"));
}

#[test]
fn check_accepts_the_band_instance() {
    let (code, out, _) = run(&["check", &fixture_str("interval_quadratic.json"), "--grid", "101"]);
    assert_eq!(code, 0);
    assert!(out.contains("recession cone is a subspace: yes"));
    assert!(out.contains("requested family: all finite subsets -> yes"));
    assert!(out.contains("(closed)"), "the sampled gap should close:\n{out}");
}

#[test]
fn verify_passes_the_fixture_certificate() {
    let (code, out, _) = run(&[
        "verify",
        &fixture_str("interval_quadratic.json"),
        "--cert",
        &fixture_str("interval_quadratic_cert.json"),
    ]);
    assert_eq!(code, 0);
    assert!(out.contains("verdict: pass"));
    assert!(out.contains("lower bound 0.500000000000 certified: yes"));
}

#[test]
fn verify_rejects_an_overstated_bound() {
    let (code, out, _) = run(&[
        "verify",
        &fixture_str("interval_quadratic.json"),
        "--cert",
        &fixture_str("interval_quadratic_cert.json"),
        "--alpha",
        "0.6",
    ]);
    assert_eq!(code, 1);
    assert!(out.contains("certified: no"));
    assert!(out.contains("verdict: fail"));
}

#[test]
fn input_errors_exit_with_two() {
    let (code, _, err) = run(&["solve", "no-such-file.json"]);
    assert_eq!(code, 2);
    assert!(err.contains("no-such-file.json"));

    let (code, _, err) = run(&[
        "dual",
        &fixture_str("interval_quadratic.json"),
        "--family",
        "nope",
    ]);
    assert_eq!(code, 2);
    assert!(err.contains("h1, hn, full"));

    let (code, _, _) = run(&["oracle", &fixture_str("countable_divergent.json")]);
    assert_eq!(code, 2, "grid oracle needs an interval index set");
}

#[test]
fn help_exits_cleanly() {
    let (code, out, _) = run(&["--help"]);
    assert_eq!(code, 0);
    for sub in ["solve", "dual", "trace", "check", "verify", "oracle"] {
        assert!(out.contains(sub), "help lacks subcommand {sub}");
    }
}

#[test]
fn fixture_problems_round_trip_through_render() {
    for name in ["interval_quadratic.json", "countable_divergent.json"] {
        let text = std::fs::read_to_string(fixture(name)).expect("fixture exists");
        let p1 = haardual::io::parse_problem(&text).expect("fixture parses");
        let rendered = haardual::io::render_problem(&p1);
        let p2 = haardual::io::parse_problem(&rendered).expect("rendered text parses");
        assert_eq!(p1, p2, "{name} does not round-trip");
    }
}
