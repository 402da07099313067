//! End-to-end tests of the command-line front end through `run_with`.

use kpu_cli::{run_with, EXIT_CHECK_FAILED, EXIT_OK, EXIT_OUT_OF_REGIME, EXIT_USAGE};
use kpu_core::bounds::BoundsReport;
use kpu_core::criterion::KpuReport;
use kpu_core::golden::golden;
use kpu_core::oracle::OracleReport;
use kpu_core::tables::{TableId, TableResult};

struct Output {
    code: i32,
    stdout: String,
    stderr: String,
}

fn kpu(args: &[&str]) -> Output {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run_with(std::iter::once("kpu").chain(args.iter().copied()), &mut out, &mut err);
    Output { code, stdout: String::from_utf8(out).unwrap(), stderr: String::from_utf8(err).unwrap() }
}

#[test]
fn tables_loops_checked_against_published_values() {
    let o = kpu(&["tables", "--id", "loops", "--max", "28", "--check-against-paper"]);
    assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
    let t: TableResult = serde_json::from_str(&o.stdout).unwrap();
    assert_eq!(t.table_id, TableId::LoopsThroughEdge);
    assert_eq!(t.get(28), Some(81368));
}

#[test]
fn tables_r_csv_has_nine_rows() {
    let o = kpu(&["tables", "--id", "r", "--max", "20", "--format", "csv"]);
    assert_eq!(o.code, EXIT_OK);
    let lines: Vec<&str> = o.stdout.lines().collect();
    assert_eq!(lines[0], "index,value");
    assert_eq!(lines.len() - 1, 9);
}

#[test]
fn tables_invalid_range_is_a_usage_error() {
    let o = kpu(&["tables", "--id", "loops", "--max", "7"]);
    assert_eq!(o.code, EXIT_USAGE);
    assert!(o.stderr.contains("even"), "{}", o.stderr);
    assert_eq!(kpu(&["tables", "--id", "nope"]).code, EXIT_USAGE);
    assert_eq!(kpu(&["tables"]).code, EXIT_USAGE);
    assert_eq!(kpu(&["frobnicate"]).code, EXIT_USAGE);
}

#[test]
fn tables_mismatch_prints_citation() {
    // The S table differs from the printed one in several cells; the check
    // must fail and name the offending entries.
    let o = kpu(&["tables", "--id", "s", "--max", "20", "--check-golden"]);
    assert_eq!(o.code, EXIT_CHECK_FAILED);
    assert!(o.stderr.contains("mismatch: w5:S9"), "{}", o.stderr);
    assert!(o.stderr.contains("supremum table"));
}

#[test]
fn tables_json_round_trip_and_output_file() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("q.json");
    let o = kpu(&["tables", "--id", "q", "--max", "13", "--output", file.to_str().unwrap()]);
    assert_eq!(o.code, EXIT_OK);
    let from_stdout: TableResult = serde_json::from_str(&o.stdout).unwrap();
    let from_file: TableResult = serde_json::from_str(&std::fs::read_to_string(&file).unwrap()).unwrap();
    assert_eq!(from_stdout, from_file);
    assert_eq!(serde_json::to_string_pretty(&from_stdout).unwrap() + "\n", o.stdout);
}

#[test]
fn tables_use_cache_dir() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    assert_eq!(kpu(&["--cache-dir", d, "tables", "--id", "n", "--max", "8"]).code, EXIT_OK);
    let entries: Vec<_> = std::fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
    assert_eq!(entries.len(), 1);
    assert!(entries[0].to_string_lossy().starts_with("n-max8"));
}

#[test]
fn kpu_hex_passes_with_published_totals() {
    let o = kpu(&["kpu", "--lattice", "hex", "--m", "0", "--K", "25", "--N", "78"]);
    assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
    let r: KpuReport = serde_json::from_str(&o.stdout).unwrap();
    assert!(r.pass);
    for c in &r.columns {
        let printed = golden().total_cell(&c.column, "Total").unwrap();
        assert!((c.total - printed).abs() <= 5e-4, "{}", c.column);
    }
    assert_eq!(serde_json::to_string_pretty(&r).unwrap() + "\n", o.stdout);
}

#[test]
fn kpu_hex_out_of_regime() {
    let o = kpu(&["kpu", "--lattice", "hex", "--K", "10", "--N", "78"]);
    assert_eq!(o.code, EXIT_OUT_OF_REGIME);
    assert!(o.stderr.contains("outside proven regime"));
}

#[test]
fn kpu_square_undecorated_is_refused() {
    let o = kpu(&["kpu", "--lattice", "square", "--m", "0"]);
    assert_eq!(o.code, EXIT_OUT_OF_REGIME);
    assert!(o.stderr.contains("m >= 1"), "{}", o.stderr);
}

#[test]
fn kpu_square_m1_passes() {
    let o = kpu(&["kpu", "--lattice", "square", "--m", "1", "--K", "2", "--N", "10"]);
    assert_eq!(o.code, EXIT_OK);
    let r: KpuReport = serde_json::from_str(&o.stdout).unwrap();
    assert!(r.pass && r.columns[0].total <= 0.08425 + 5e-4);
}

#[test]
fn kpu_text_format() {
    let o = kpu(&["kpu", "--lattice", "square", "--m", "2", "--format", "text"]);
    assert_eq!(o.code, EXIT_OK);
    assert!(o.stdout.contains("PASS"));
}

#[test]
fn bounds_ltqo_example() {
    // N − K = 175 is below ln(25)/η = 187.1, so the LTQO hypothesis fails.
    let o = kpu(&["bounds", "--ltqo", "--lattice", "hex", "--m", "0", "--K", "25", "--N", "200", "--normA", "1"]);
    assert_eq!(o.code, EXIT_OUT_OF_REGIME);
    let r: BoundsReport = serde_json::from_str(&o.stdout).unwrap();
    assert_eq!(r.results.len(), 1);
    assert!(!r.results[0].regime_ok);
    assert!(r.results[0].value.is_finite() && r.results[0].value > 0.0);

    let o = kpu(&["bounds", "--ltqo", "--lattice", "hex", "--m", "0", "--K", "25", "--N", "213", "--normA", "1"]);
    assert_eq!(o.code, EXIT_OK);
    let r: BoundsReport = serde_json::from_str(&o.stdout).unwrap();
    assert!(r.results[0].regime_ok);
}

#[test]
fn bounds_corr_below_distance_threshold() {
    let o = kpu(&["bounds", "--corr", "--lattice", "hex", "--M", "50", "--d", "49"]);
    assert_eq!(o.code, EXIT_OUT_OF_REGIME);
    let r: BoundsReport = serde_json::from_str(&o.stdout).unwrap();
    assert!(!r.results[0].regime_ok);
    assert!(r.results[0].violations.iter().any(|v| v.contains("d >= 50")));
}

#[test]
fn bounds_print_c_gamma_check() {
    let o = kpu(&["bounds", "--f", "--lattice", "square", "--m", "1", "--K", "2", "--N", "50", "--format", "text"]);
    assert_eq!(o.code, EXIT_OK);
    assert!(o.stdout.contains("quoted 2.4951") && o.stdout.contains("recomputed 2.6494"), "{}", o.stdout);
}

#[test]
fn bounds_usage_errors() {
    assert_eq!(kpu(&["bounds", "--lattice", "hex"]).code, EXIT_USAGE);
    assert_eq!(kpu(&["bounds", "--ltqo", "--lattice", "hex", "--K", "25"]).code, EXIT_USAGE);
    assert_eq!(kpu(&["bounds", "--corr", "--lattice", "hex", "--M", "50"]).code, EXIT_USAGE);
    assert_eq!(kpu(&["bounds", "--indist", "--lattice", "hex", "--K", "25", "--N", "99", "--normA", "-1"]).code, EXIT_USAGE);
}

#[test]
fn validate_suite() {
    let o = kpu(&["validate", "--seed", "42", "--samples", "1000000"]);
    assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
    let r: OracleReport = serde_json::from_str(&o.stdout).unwrap();
    assert!(r.pass);
    assert_eq!(r.samples, 1_000_000);
    assert_eq!(kpu(&["validate", "--samples", "10"]).code, EXIT_USAGE);
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(kpu(&["--help"]).code, EXIT_OK);
    assert_eq!(kpu(&["--version"]).code, EXIT_OK);
}
