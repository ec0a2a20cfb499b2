use std::process::{Command, Output};

use qtrain::json::canonicalize;
use serde_json::Value;

fn qtrain(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qtrain"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = qtrain(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn probs(report: &Value) -> Vec<f64> {
    report["distribution"]["entries"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| e["prob"].as_f64().unwrap())
        .collect()
}

#[test]
fn measure_grid_point() {
    let v: Value = serde_json::from_str(&stdout(&["measure", "--n", "4", "--alpha", "1", "--integral", "5"])).unwrap();
    let p = probs(&v);
    assert_eq!(p.len(), 16);
    assert!((p[5] - 1.0).abs() < 1e-12);
    assert!(v["sample"].is_null());
    assert!(v["moments"]["mean_abs"].as_f64().unwrap().abs() < 1e-12);
}

#[test]
fn measure_constant_field_at_scale_m() {
    let v: Value =
        serde_json::from_str(&stdout(&["measure", "--n", "7", "--alpha", "1", "--field", "constant:0.1:0:128"])).unwrap();
    let total: f64 = probs(&v).iter().sum();
    assert!((total - 1.0).abs() < 1e-10);
    assert!((v["integral"].as_f64().unwrap() - 12.8).abs() < 1e-12);
    assert_eq!(v["field"]["kind"], "constant");
}

#[test]
fn measure_two_outcomes() {
    let v: Value = serde_json::from_str(&stdout(&["measure", "--n", "1", "--alpha", "1", "--integral", "1.5"])).unwrap();
    let p = probs(&v);
    assert!((p[0] - 0.5).abs() < 1e-12 && (p[1] - 0.5).abs() < 1e-12);
}

#[test]
fn measure_vm_protocol_agrees() {
    let a: Value = serde_json::from_str(&stdout(&["measure", "--n", "6", "--integral", "9.37"])).unwrap();
    let b: Value =
        serde_json::from_str(&stdout(&["measure", "--n", "6", "--integral", "9.37", "--protocol", "vm"])).unwrap();
    for (x, y) in probs(&a).iter().zip(probs(&b)) {
        assert!((x - y).abs() < 1e-10);
    }
}

#[test]
fn measure_samples_need_seed() {
    let out = qtrain(&["measure", "--n", "3", "--integral", "1.2", "--trials", "5"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
    let v: Value =
        serde_json::from_str(&stdout(&["measure", "--n", "3", "--integral", "1.2", "--trials", "5", "--seed", "4"]))
            .unwrap();
    assert_eq!(v["sample"]["trials"], 5);
    let m = v["sample"]["first"]["m"].as_u64().unwrap();
    assert_eq!(v["sample"]["first"]["estimate"].as_f64().unwrap(), m as f64);
}

#[test]
fn measure_table_field() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("phi.csv");
    std::fs::write(&path, "x,phi\n0,0\n1,2\n2,0\n").unwrap();
    let spec = format!("table:{}", path.display());
    let v: Value = serde_json::from_str(&stdout(&["measure", "--n", "3", "--field", &spec])).unwrap();
    assert!((v["integral"].as_f64().unwrap() - 2.0).abs() < 1e-12);
}

#[test]
fn json_artifacts_round_trip_byte_identical() {
    let cases: [&[&str]; 3] = [
        &["measure", "--n", "5", "--integral", "3.14159", "--trials", "100", "--seed", "1"],
        &["compare", "--n", "9", "--integral", "51.2", "--trials", "2000", "--seed", "8"],
        &["strings", "--n", "3", "--imprint", "2", "--format", "json"],
    ];
    for args in cases {
        let text = stdout(args);
        assert_eq!(canonicalize(&text).unwrap(), text, "{args:?}");
    }
}

fn figure_rows(text: &str) -> Vec<(f64, f64)> {
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("delta_i,p"));
    lines
        .map(|l| {
            let (a, b) = l.split_once(',').unwrap();
            (a.parse().unwrap(), b.parse().unwrap())
        })
        .collect()
}

#[test]
fn figure2_defaults() {
    let rows = figure_rows(&stdout(&["figure2"]));
    assert_eq!(rows.len(), 128 * 16 + 1);
    assert_eq!(rows.first().unwrap().0, -64.0);
    let at = |u: f64| rows.iter().find(|r| r.0 == u).unwrap().1;
    assert_eq!(at(0.0), 1.0);
    assert!(at(1.0) < 1e-12);
    for &(u, p) in &rows {
        assert!((p - at(-u)).abs() < 1e-12);
    }
}

#[test]
fn figure2_markers() {
    let dir = tempfile::tempdir().unwrap();
    let markers = dir.path().join("markers.csv");
    let curve = stdout(&[
        "figure2", "--n", "7", "--min", "-5", "--max", "5", "--integral", "12.8",
        "--markers-output", markers.to_str().unwrap(),
    ]);
    assert_eq!(figure_rows(&curve).len(), 161);
    let rows = figure_rows(&std::fs::read_to_string(&markers).unwrap());
    // Outcomes αm sit at δI = n − 0.8 for integer n.
    assert_eq!(rows.len(), 10);
    for (u, p) in rows {
        let frac = u - u.floor();
        assert!((frac - 0.2).abs() < 1e-9, "{u}");
        assert!(p > 0.0 && p < 1.0);
    }
    let out = qtrain(&["figure2", "--integral", "1.0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn compare_report_and_guard() {
    let v: Value =
        serde_json::from_str(&stdout(&["compare", "--n", "10", "--integral", "307.2", "--trials", "20000", "--seed", "3"]))
            .unwrap();
    let q = v["quantum"]["empirical"]["mean_abs"].as_f64().unwrap();
    let c = v["counter"]["empirical"]["mean_abs"].as_f64().unwrap();
    assert!(q < c);
    assert_eq!(v["seed"], 3);
    assert_eq!(v["trials"], 20000);

    let out = qtrain(&["compare", "--n", "10", "--integral", "307.2", "--trials", "10", "--seed", "3"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("at least"));

    let out = qtrain(&["compare", "--n", "4", "--integral", "20", "--trials", "1000", "--seed", "3"]);
    assert_eq!(out.status.code(), Some(3));

    let csv = stdout(&["compare", "--n", "6", "--integral", "6.4", "--trials", "1000", "--seed", "3", "--format", "csv"]);
    assert_eq!(csv.lines().count(), 6);
    assert!(csv.starts_with("strategy,source,std_dev,mean_abs,trials,seed\n"));
}

#[test]
fn marks_examples() {
    let five = stdout(&["marks", "--n", "3", "--count", "5"]);
    assert!(five.contains("bits (MSB first): 101\n"));
    assert!(five.contains("bits (LSB first): 101\n"));
    let zero = stdout(&["marks", "--n", "3", "--count", "0"]);
    assert!(zero.contains("bits (MSB first): 000\n"));
    let eight = stdout(&["marks", "--n", "3", "--count", "8"]);
    assert!(eight.contains("bits (MSB first): 000\n"));
    assert!(eight.contains("mod 8"));
    let six = stdout(&["marks", "--n", "4", "--count", "6"]);
    assert!(six.contains("bits (MSB first): 0110\n"));
    assert!(six.contains("bits (LSB first): 0110\n"));
}

#[test]
fn marks_needs_seed_with_field() {
    assert_eq!(qtrain(&["marks", "--n", "3", "--field", "constant:1:0:5"]).status.code(), Some(2));
    assert_eq!(qtrain(&["marks", "--n", "3"]).status.code(), Some(2));
    let s = stdout(&["marks", "--n", "8", "--field", "constant:1:0:5", "--seed", "2"]);
    assert!(s.starts_with("marks: "));
}

#[test]
fn strings_examples() {
    let s = stdout(&["strings", "--n", "4"]);
    let lines: Vec<&str> = s.lines().take(5).collect();
    assert_eq!(
        lines,
        [
            "0000000000000000",
            "0000000011111111",
            "0000111100001111",
            "0011001100110011",
            "0101010101010101",
        ]
    );
    assert!(stdout(&["strings", "--n", "4", "--imprint", "3"]).contains("decoded: 3\n"));
    let one = stdout(&["strings", "--n", "1"]);
    assert!(one.starts_with("00\n01\n"));
}

#[test]
fn strings_errors() {
    assert_eq!(qtrain(&["strings", "--n", "0"]).status.code(), Some(2));
    assert_eq!(qtrain(&["strings", "--n", "3", "--imprint", "5"]).status.code(), Some(2));
    assert_eq!(qtrain(&["strings", "--n", "3", "--bits", "10000000"]).status.code(), Some(3));
    assert_eq!(qtrain(&["strings", "--n", "3", "--bits", "1000"]).status.code(), Some(2));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(qtrain(&[]).status.code(), Some(2));
    assert_eq!(qtrain(&["bogus"]).status.code(), Some(2));
    assert_eq!(qtrain(&["measure", "--n", "3"]).status.code(), Some(2));
    assert_eq!(qtrain(&["measure", "--n", "3", "--integral", "1", "--field", "constant:1:0:1"]).status.code(), Some(2));
    assert_eq!(qtrain(&["measure", "--n", "3", "--alpha", "-1", "--integral", "1"]).status.code(), Some(2));
    assert_eq!(qtrain(&["measure", "--n", "3", "--field", "constant:-1:0:1"]).status.code(), Some(2));
    assert_eq!(qtrain(&["--help"]).status.code(), Some(0));
}

#[test]
fn output_file_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.json");
    let direct = stdout(&["measure", "--n", "4", "--integral", "2.5"]);
    let out = qtrain(&["measure", "--n", "4", "--integral", "2.5", "-o", path.to_str().unwrap()]);
    assert!(out.status.success() && out.stdout.is_empty());
    assert_eq!(std::fs::read_to_string(&path).unwrap(), direct);
}
