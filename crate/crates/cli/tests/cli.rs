use std::f64::consts::PI;
use std::fs;

use mim_cli::run_with;
use serde_json::Value;

struct Outcome {
    code: i32,
    out: String,
    err: String,
}

fn mim(args: &[&str]) -> Outcome {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let argv = std::iter::once("mim").chain(args.iter().copied());
    let code = run_with(argv, &mut out, &mut err);
    Outcome {
        code,
        out: String::from_utf8(out).unwrap(),
        err: String::from_utf8(err).unwrap(),
    }
}

fn csv_rows(text: &str) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let headers = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r
        .records()
        .map(|rec| rec.unwrap().iter().map(|f| f.parse().unwrap()).collect())
        .collect();
    (headers, rows)
}

const TABLE1: &[&str] = &["spectrum", "--xi-l", "2", "--delta", "0.01", "--alpha", "2", "--beta", "0.2", "--count", "20"];

#[test]
fn spectrum_reproduces_first_table_row() {
    let o = mim(TABLE1);
    assert_eq!(o.code, 0, "{}", o.err);
    assert_eq!(o.out.lines().count(), 21);
    let (headers, rows) = csv_rows(&o.out);
    assert_eq!(headers, ["n", "omega", "omega_approx", "error_bound", "percent"]);
    let expected = [1.0, 1.56241, 1.56266, 0.00293, -0.01548];
    for (i, (got, want)) in rows[0].iter().zip(expected).enumerate() {
        let tol = if i == 4 { 0.01 } else { 1e-4 };
        assert!((got - want).abs() <= tol, "column {i}: {got} vs {want}");
    }
    assert!((rows[19][1] - 31.3999).abs() <= 1e-4);
}

#[test]
fn structural_example_verifies() {
    let o = mim(&["structural", "--xi-l", "2", "--alpha", "2", "--n", "5", "--k", "2", "--verify", "--grid", "100"]);
    assert_eq!(o.code, 0, "{}", o.err);
    let line = o.out.lines().nth(1).unwrap();
    let fields: Vec<&str> = line.split(',').collect();
    assert!((fields[2].parse::<f64>().unwrap() - 3.0 * PI).abs() < 1e-7);
    assert!((fields[4].parse::<f64>().unwrap() - 1.0 / 3.0).abs() < 1e-8);
    assert_eq!(fields[6], "100");
    assert_eq!(*fields.last().unwrap(), "PASS");
}

#[test]
fn failed_verification_exits_one() {
    let o = mim(&["structural", "--xi-l", "2", "--alpha", "2", "--n", "5", "--k", "2", "--verify", "--grid", "5", "--tol", "1e-30"]);
    assert_eq!(o.code, 1);
    assert!(o.out.contains("FAIL"));
    assert!(o.err.contains("failed verification"));
}

#[test]
fn structural_width_mismatch_is_usage_error() {
    let o = mim(&["structural", "--xi-l", "2", "--alpha", "2", "--delta", "0.3", "--n", "5", "--k", "2"]);
    assert_eq!(o.code, 2);
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["spectrum", "--bogus"][..],
        &["spectrum", "--xi-l", "2", "--delta", "0.01", "--beta", "0.2"],
        &["spectrum", "--xi-l", "2", "--delta", "0.01", "--alpha", "2", "--chi0", "0.1", "--beta", "0.2"],
        &["spectrum", "--xi-l", "2", "--delta", "0.01", "--alpha", "2", "--beta", "0.2", "--q0", "1"],
        &["spectrum", "--xi-l", "2", "--delta", "3", "--alpha", "2", "--beta", "0.2"],
        &["spectrum", "--xi-l", "2", "--delta", "0.01", "--alpha", "2", "--beta", "0.2", "--digits", "0"],
        &["nonsense"],
    ] {
        let o = mim(args);
        assert_eq!(o.code, 2, "{args:?}");
        assert!(!o.err.is_empty() && o.out.is_empty(), "{args:?}");
    }
}

#[test]
fn every_subcommand_has_help() {
    for cmd in ["spectrum", "structural", "midpoint", "sweep", "modes", "couplings", "simulate"] {
        let o = mim(&[cmd, "--help"]);
        assert_eq!(o.code, 0);
        assert!(o.out.contains("--config") && o.out.contains("--digits"), "{cmd}");
    }
}

#[test]
fn io_failure_exits_one() {
    let mut args = TABLE1.to_vec();
    args.extend(["--output", "/nonexistent-dir/out.csv"]);
    assert_eq!(mim(&args).code, 1);
}

#[test]
fn config_file_is_equivalent_to_flags() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cfg.json");
    fs::write(&path, r#"{"xi-l": 2, "delta": 0.01, "alpha": 2, "beta": 0.2, "count": 20}"#).unwrap();
    let from_file = mim(&["spectrum", "--config", path.to_str().unwrap()]);
    assert_eq!(from_file.code, 0, "{}", from_file.err);
    assert_eq!(from_file.out, mim(TABLE1).out);

    let overridden = mim(&["spectrum", "--config", path.to_str().unwrap(), "--count", "3"]);
    assert_eq!(overridden.out.lines().count(), 4);

    fs::write(&path, r#"{"xi-l": 2, "delta": 0.01, "alpha": 2, "beta": 0.2, "colour": 1}"#).unwrap();
    let bad = mim(&["spectrum", "--config", path.to_str().unwrap()]);
    assert_eq!(bad.code, 2);
    assert!(bad.err.contains("colour"));
}

#[test]
fn boolean_options_round_trip_through_config() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cfg.json");
    fs::write(&path, r#"{"xi-l": 2, "alpha": 2, "n": 5, "k": 2, "verify": true, "grid": 10}"#).unwrap();
    let o = mim(&["structural", "--config", path.to_str().unwrap()]);
    assert_eq!(o.code, 0, "{}", o.err);
    assert!(o.out.contains("PASS"));
}

#[test]
fn sweep_is_long_format_and_deterministic() {
    let args = ["sweep", "--xi-l", "2", "--delta", "0.3333333333333333", "--alpha", "2", "--points", "100", "--count", "29"];
    let first = mim(&args);
    assert_eq!(first.code, 0, "{}", first.err);
    assert_eq!(first.out, mim(&args).out);
    let (headers, rows) = csv_rows(&first.out);
    assert_eq!(headers, ["beta", "n", "omega"]);
    assert_eq!(rows.len(), 2900);
    for (i, row) in rows.iter().enumerate() {
        assert_eq!(row[1] as usize, i % 29 + 1);
        if i % 29 > 0 {
            assert!(row[0] == rows[i - 1][0] && row[2] > rows[i - 1][2]);
        }
    }
    // 3 pi is pinned at every position.
    let pinned = rows.iter().filter(|r| (r[2] - 3.0 * PI).abs() < 1e-7).count();
    assert_eq!(pinned, 100);
}

#[test]
fn digits_flag_controls_precision() {
    let mut args = TABLE1[..TABLE1.len() - 2].to_vec();
    args.extend(["--count", "1", "--digits", "4"]);
    let o = mim(&args);
    assert_eq!(o.out.lines().nth(1).unwrap(), "1,1.562,1.563,0.002929,-0.01548");
}

#[test]
fn json_output_parses_with_sorted_keys() {
    let mut args = TABLE1[..TABLE1.len() - 2].to_vec();
    args.extend(["--format", "json", "--count", "2"]);
    let o = mim(&args);
    let doc: Value = serde_json::from_str(&o.out).unwrap();
    let rows = doc["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 2);
    let keys: Vec<&String> = rows[0].as_object().unwrap().keys().collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);
    assert_eq!(doc["config"]["xi_l"], 2.0);
}

#[test]
fn midpoint_rows_are_roots() {
    let o = mim(&["midpoint", "--xi-l", "2", "--alpha", "2"]);
    let (_, rows) = csv_rows(&o.out);
    assert_eq!(rows.len(), 4);
    for r in rows {
        assert!(r[4].abs() < 1e-10);
        assert!((2.0 * r[2] * r[3] - (2.0 * r[0] + 1.0) * PI / 2.0).abs() < 1e-7);
    }
}

#[test]
fn modes_and_couplings() {
    let o = mim(&["modes", "--xi-l", "2", "--delta", "0.2", "--alpha", "1", "--beta", "0.3", "--count", "2", "--points", "5", "--thin"]);
    let (headers, rows) = csv_rows(&o.out);
    assert_eq!(headers, ["n", "xi", "value", "derivative", "thin_value"]);
    assert_eq!(rows.len(), 10);
    for r in rows {
        let exact = (r[0] * PI * r[1] / 2.0).sin();
        assert!((r[2] - exact).abs() < 1e-8 && (r[4] - exact).abs() < 1e-8);
    }
    let o = mim(&["couplings", "--xi-l", "2", "--delta", "0.01", "--alpha", "2", "--beta", "0.2", "--count", "3", "--format", "json"]);
    let doc: Value = serde_json::from_str(&o.out).unwrap();
    assert!(doc["antisymmetry_defect"].as_f64().unwrap() < 1e-7);
    assert_eq!(doc["rows"].as_array().unwrap().len(), 9);
}

#[test]
fn simulate_writes_norms_and_profiles() {
    let dir = tempfile::tempdir().unwrap();
    let profiles = dir.path().join("profiles.csv");
    let o = mim(&[
        "simulate", "--xi-l", "2", "--delta", "0.01", "--alpha", "2", "--model", "thin",
        "--times", "100", "--profile-times", "0,100", "--points", "11",
        "--profiles", profiles.to_str().unwrap(),
    ]);
    assert_eq!(o.code, 0, "{}", o.err);
    let (headers, rows) = csv_rows(&o.out);
    assert_eq!(headers[..6], ["tau", "q", "phase", "a", "b", "d"]);
    assert!((rows[0][3] - 0.6358).abs() < 2e-3);
    let (headers, prof) = csv_rows(&fs::read_to_string(&profiles).unwrap());
    assert_eq!(headers, ["tau", "xi", "reconstructed", "multiple_scales", "difference"]);
    assert_eq!(prof.len(), 22);
    assert!(prof[..11].iter().all(|r| r[4].abs() < 1e-12));
}

#[test]
fn simulate_rejects_inadmissible_trajectory() {
    let o = mim(&["simulate", "--xi-l", "2", "--delta", "0.01", "--alpha", "2", "--center", "1.95", "--amplitude", "0.2"]);
    assert_eq!(o.code, 1);
    assert!(o.err.contains("admissible"));
}
