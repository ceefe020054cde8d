use std::path::Path;
use std::process::{Command, Output};

use coopifc::gdof::{read_csv, w_curve};
use coopifc::log2_1p;
use serde_json::Value;

fn coopifc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_coopifc")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_owned()
}

const SNR: f64 = 1000.0;

/// Two parallel point-to-point links with received SNR 1000.
fn decoupled_channel(dir: &Path) -> String {
    let g = SNR.sqrt();
    let json = format!(
        r#"{{"K": 2,
  "H": [[0,0,0,0],[0,0,0,0],[{g},0,0,0],[0,{g},0,0]],
  "P": [1,1,0,0],
  "SigmaZ": [[1,0,0,0],[0,1,0,0],[0,0,1,0],[0,0,0,1]],
  "C": [0,0,0,0]}}"#
    );
    write(dir, "decoupled.json", &json)
}

#[test]
fn eval_bounds_on_decoupled_channel() {
    let dir = tempfile::tempdir().unwrap();
    let ch = decoupled_channel(dir.path());
    let o = coopifc(&["eval-bounds", "--channel", &ch, "--restarts", "4"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let headline = v["sum_rate_upper"]["headline_bits"].as_f64().unwrap();
    assert!((headline - 2.0 * log2_1p(SNR)).abs() < 1e-6, "headline {headline}");
    assert_eq!(v["seed"], 0);
}

#[test]
fn eval_bounds_no_coop_symmetric_headline() {
    let dir = tempfile::tempdir().unwrap();
    let sym = write(dir.path(), "sym.json", r#"{"snr": 1e8, "alpha": 0.5}"#);
    let o = coopifc(&["eval-bounds", "--sym", &sym, "--mode", "no-coop", "--restarts", "8"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let normalized = v["sum_rate_upper"]["headline_normalized"].as_f64().unwrap();
    assert!((1.45..=1.55).contains(&normalized), "normalized headline {normalized}");
}

#[test]
fn eval_bounds_rejects_malformed_json() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.json", r#"{"K": 2, "H": [[0,0"#);
    let o = coopifc(&["eval-bounds", "--channel", &bad]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("parse error"), "{}", stderr(&o));
}

#[test]
fn eval_bounds_reports_each_validation_issue() {
    let dir = tempfile::tempdir().unwrap();
    let json = r#"{"K": 2,
  "H": [[1,0,0,0],[0,0,0,0],[1,0,0,0],[0,1,0,0]],
  "P": [1,-1,0,0],
  "SigmaZ": [[1,0,0,0],[0,1,0,0],[0,0,1,0],[0,0,0,1]],
  "C": [0,0,0,0]}"#;
    let ch = write(dir.path(), "invalid.json", json);
    let o = coopifc(&["eval-bounds", "--channel", &ch]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).lines().filter(|l| l.starts_with("error:")).count() >= 2, "{}", stderr(&o));
}

#[test]
fn eval_bounds_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let sym = write(dir.path(), "sym.json", r#"{"snr": 100, "alpha": 0.7, "beta_s": 0.3}"#);
    let args = ["eval-bounds", "--sym", &sym, "--mode", "in-band-source", "--restarts", "4", "--seed", "7"];
    let first = coopifc(&args);
    let second = coopifc(&args);
    assert!(first.status.success(), "{}", stderr(&first));
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn gdof_sweep_no_coop_rows_follow_w_curve() {
    let o = coopifc(&["gdof-sweep", "--mode", "no-coop", "--beta", "0", "--grid", "0:3:0.5"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let rows = read_csv(o.stdout.as_slice()).unwrap();
    assert_eq!(rows.len(), 7);
    for (i, row) in rows.iter().enumerate() {
        let alpha = 0.5 * i as f64;
        assert_eq!(row.alpha, alpha);
        assert!((row.d - w_curve(alpha)).abs() < 1e-6);
        assert!(row.tight);
    }
}

#[test]
fn gdof_sweep_ultimate_has_one_exceptional_point() {
    let o = coopifc(&["gdof-sweep", "--mode", "ultimate", "--grid", "0:3:0.25"]);
    assert!(o.status.success(), "{}", stderr(&o));
    for row in read_csv(o.stdout.as_slice()).unwrap() {
        let want = if row.alpha == 1.0 { 1.0 } else { 2.0 * row.alpha.max(1.0) };
        assert_eq!(row.two_d, want, "alpha {}", row.alpha);
    }
}

#[test]
fn gdof_sweep_no_coop_at_two_thirds() {
    let o = coopifc(&["gdof-sweep", "--mode", "no-coop", "--beta", "0.125", "--grid", "0:1.3333333333333333:0.6666666666666666"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("0.666667,no-coop,0.125000,0.666667,1.333333,1"), "{}", stdout(&o));
}

#[test]
fn gdof_sweep_rejects_decreasing_grid() {
    let o = coopifc(&["gdof-sweep", "--grid", "3:0:0.5"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("grid not increasing"), "{}", stderr(&o));
}

#[test]
fn gdof_sweep_svg_has_polyline_per_mode() {
    let o = coopifc(&["gdof-sweep", "--mode", "no-coop,output-feedback,ultimate", "--format", "svg"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(stdout(&o).matches("<polyline").count(), 3);
}

#[test]
fn csv_round_trips_to_six_decimals() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.csv");
    let o = coopifc(&[
        "gdof-sweep",
        "--mode",
        "in-band-source,rate-limited-feedback",
        "--beta",
        "0.3",
        "--grid",
        "0:3:0.01",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = std::fs::read_to_string(&path).unwrap();
    let rows = read_csv(text.as_bytes()).unwrap();
    assert_eq!(rows.len(), 2 * 301);
    for (row, line) in rows.iter().zip(text.lines().skip(1)) {
        let again = format!(
            "{:.6},{},{:.6},{:.6},{:.6},{}",
            row.alpha,
            row.mode,
            row.beta,
            row.d,
            row.two_d,
            u8::from(row.tight)
        );
        assert_eq!(again, line);
    }
}

#[test]
fn reproduce_fig_writes_six_csvs_and_svg() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    for which in ["2", "3"] {
        let o = coopifc(&["reproduce-fig", "--which", which, "--out", out]);
        assert!(o.status.success(), "{}", stderr(&o));
        assert_eq!(stdout(&o).lines().count(), 7);
    }
    let row_at = |file: &str, alpha: f64| {
        let rows = read_csv(std::fs::read_to_string(dir.path().join(file)).unwrap().as_bytes()).unwrap();
        rows.into_iter().find(|r| (r.alpha - alpha).abs() < 1e-9).unwrap()
    };
    assert_eq!(row_at("fig2_ultimate.csv", 1.0).two_d, 1.0);
    assert_eq!(row_at("fig2_output-feedback.csv", 1.0).two_d, 1.0);
    assert_eq!(row_at("fig3_rate-limited-feedback.csv", 0.0).two_d, 2.0);
    let svg = std::fs::read_to_string(dir.path().join("fig3.svg")).unwrap();
    assert_eq!(svg.matches("<polyline").count(), 6);
}

#[test]
fn reproduce_fig_rejects_unknown_figure() {
    let o = coopifc(&["reproduce-fig", "--which", "4"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn ksum_gen_matches_golden_chain() {
    let o = coopifc(&["ksum-gen", "--K", "4", "--subset", "1,2,3"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(stdout(&o), include_str!("golden/ksum_k4_123.txt"));
}

#[test]
fn ksum_gen_rejects_out_of_range_user() {
    let o = coopifc(&["ksum-gen", "--K", "4", "--subset", "1,5"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("user index out of range"), "{}", stderr(&o));
}

#[test]
fn ksum_eval_on_decoupled_channel_sums_link_capacities() {
    let dir = tempfile::tempdir().unwrap();
    let ch = decoupled_channel(dir.path());
    let o = coopifc(&["ksum-eval", "--K", "2", "--subset", "1,2", "--channel", &ch, "--format", "json"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let total = v["total_bits"].as_f64().unwrap();
    assert!((total - 2.0 * log2_1p(SNR)).abs() < 1e-9, "total {total}");
    assert!(v["consistency_discrepancy"].as_f64().unwrap() < 1e-9);
}
