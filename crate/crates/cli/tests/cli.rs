use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn szeta(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_szeta")).args(args).env_remove("SZETA_THREADS").output().unwrap()
}

fn stdout(output: &Output) -> String {
    assert!(output.status.success(), "failed: {}", String::from_utf8_lossy(&output.stderr));
    String::from_utf8(output.stdout.clone()).unwrap()
}

fn schema(name: &str) -> jsonschema::Validator {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("schemas").join(name);
    let schema: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    jsonschema::validator_for(&schema).unwrap()
}

fn assert_valid(validator: &jsonschema::Validator, instance: &Value) {
    let errors: Vec<String> = validator.iter_errors(instance).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "schema violations: {errors:?}\n{instance:#}");
}

fn without_wall_time(csv: &str) -> String {
    csv.lines().filter(|l| !l.starts_with("# wall_time_s:")).collect::<Vec<_>>().join("\n")
}

fn data_lines(csv: &str) -> Vec<&str> {
    csv.lines().filter(|l| !l.starts_with('#')).collect()
}

fn header_config(csv: &str) -> String {
    csv.lines()
        .skip_while(|l| *l != "# config-begin")
        .skip(1)
        .take_while(|l| *l != "# config-end")
        .map(|l| l.strip_prefix("# ").unwrap_or(""))
        .collect::<Vec<_>>()
        .join("\n")
}

#[test]
fn dim_reproduces_table_value_and_matches_schema() {
    let out = stdout(&szeta(&["dim", "--theta", "30", "--M", "13"]));
    let report: Value = serde_json::from_str(&out).unwrap();
    assert_valid(&schema("dim-report.schema.json"), &report);
    let delta = report["result"]["delta"].as_f64().unwrap();
    assert!((delta - 0.18398306).abs() < 1e-6, "{delta}");
    assert_eq!(report["command"], "szeta dim --theta 30 --M 13");
}

#[test]
fn dim_bowen_agrees_with_newton() {
    let out = stdout(&szeta(&["dim", "--theta", "20", "--method", "bowen"]));
    let report: Value = serde_json::from_str(&out).unwrap();
    assert_valid(&schema("dim-report.schema.json"), &report);
    assert_eq!(report["result"]["method"], "bowen");
    assert!((report["result"]["delta"].as_f64().unwrap() - 0.15118368).abs() < 1e-6);
}

#[test]
fn dim_with_output_prints_delta_and_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("dim.json");
    let out = stdout(&szeta(&["dim", "--theta", "40", "--output", path.to_str().unwrap()]));
    let delta: f64 = out.trim().strip_prefix("delta = ").unwrap().parse().unwrap();
    assert!((delta - 0.21776581).abs() < 1e-6);
    let report: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_valid(&schema("dim-report.schema.json"), &report);
    assert_eq!(report["result"]["delta"].as_f64().unwrap(), delta);
}

#[test]
fn domain_error_exits_one_with_json() {
    let output = szeta(&["dim", "--theta", "120"]);
    assert_eq!(output.status.code(), Some(1));
    let error: Value = serde_json::from_slice(&output.stderr).unwrap();
    assert_valid(&schema("error.schema.json"), &error);
    assert_eq!(error["error"], "DisjointnessViolation");
    assert!(output.stdout.is_empty());
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["frobnicate"][..],
        &["dim"],
        &["dim", "--theta", "30", "--M", "0"],
        &["dim", "--theta", "30", "--quad-tol", "-1"],
        &["zeros", "--theta", "30", "--rect", "0,1,2"],
        &["eval", "--theta", "30", "--re", "0.5"],
    ] {
        assert_eq!(szeta(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn strict_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.toml");
    std::fs::write(&path, "[group]\nangle_degrees = 30.0\n[zeta]\nM = 8\ntruncation = 3\n").unwrap();
    let output = szeta(&["--config", path.to_str().unwrap(), "dim"]);
    assert_eq!(output.status.code(), Some(2));
    let error: Value = serde_json::from_slice(&output.stderr).unwrap();
    assert_valid(&schema("error.schema.json"), &error);
    assert!(error["message"].as_str().unwrap().contains("truncation"));
}

#[test]
fn repeated_runs_are_byte_identical() {
    for args in [
        &["--theta", "30", "--M", "8", "eval", "--grid", "-0.2,1,4,0,30,5"][..],
        &["--theta", "40", "--M", "7", "grid-logz", "--rect", "0,1,0,50", "--samples", "40", "--seed", "7"],
        &["--theta", "30", "--M", "6", "orbits"],
    ] {
        let first = stdout(&szeta(args));
        let second = stdout(&szeta(args));
        let single = Command::new(env!("CARGO_BIN_EXE_szeta")).args(args).env("SZETA_THREADS", "1").output().unwrap();
        let single = stdout(&single);
        assert_eq!(without_wall_time(&first), without_wall_time(&second));
        assert_eq!(without_wall_time(&first), without_wall_time(&single));
        assert_eq!(first.lines().filter(|l| l.starts_with("# wall_time_s:")).count(), 1);
    }
}

#[test]
fn header_config_reruns_to_identical_results() {
    let args =
        ["--theta", "40", "--M", "9", "--mode", "selberg", "--quad-tol", "1e-9", "eval", "--re", "0.4", "--im", "7"];
    let first = stdout(&szeta(&args));
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("rerun.toml");
    std::fs::write(&path, header_config(&first)).unwrap();
    let second = stdout(&szeta(&["--config", path.to_str().unwrap(), "eval", "--re", "0.4", "--im", "7"]));
    assert_eq!(data_lines(&first), data_lines(&second));
    assert_eq!(header_config(&first), header_config(&second));
    assert!(header_config(&first).contains("mode = \"selberg\""));
}

#[test]
fn csv_outputs_have_column_headers() {
    let cases: [(&[&str], &str); 5] = [
        (&["--theta", "30", "--M", "5", "eval", "--re", "1", "--im", "0"], "s_re,s_im,z_re,z_im,dz_re,dz_im"),
        (&["--theta", "30", "--M", "4", "orbits"], "n,representative,rotation_count,primitive_period,u,m"),
        (
            &["--theta", "30", "--M", "8", "err", "--m1", "4", "--m2", "5", "--samples", "5"],
            "s_re,s_im,metric,r1_re,r1_im,r2_re,r2_im",
        ),
        (&["--theta", "30", "svd-profile", "--degree", "16"], "l,mu"),
        (
            &["--theta", "30", "--M", "10", "zeros", "--rect", "0.1,0.3,-0.05,0.05"],
            "x0,x1,y0,y1,count,integral_re,integral_im,residual,panels",
        ),
    ];
    for (args, columns) in cases {
        let out = stdout(&szeta(args));
        assert_eq!(data_lines(&out)[0], columns, "{args:?}");
        let width = columns.split(',').count();
        assert!(data_lines(&out)[1..].iter().all(|row| row.split(',').count() == width));
        assert!(out.contains("# fingerprint: "));
    }
}

#[test]
fn zero_count_near_dimension() {
    let out = stdout(&szeta(&["--theta", "30", "zeros", "--rect", "0.1,0.3,-0.05,0.05"]));
    let row: Vec<&str> = data_lines(&out)[1].split(',').collect();
    assert_eq!(row[4], "1");
}

#[test]
fn locate_finds_the_dimension() {
    let out = stdout(&szeta(&["--theta", "30", "locate", "--rect", "0.1,0.3,-0.05,0.05", "--resolution", "0.01"]));
    let rows = &data_lines(&out)[1..];
    assert_eq!(rows.len(), 1);
    let cells: Vec<f64> = rows[0].split(',').map(|c| c.parse().unwrap()).collect();
    assert!(cells[0] <= 0.18398306 && 0.18398306 <= cells[1]);
    assert_eq!(cells[6], 1.0);
}

#[test]
fn orbit_rows_count_words() {
    let out = stdout(&szeta(&["--theta", "30", "--M", "5", "orbits"]));
    let mut words = [0u64; 6];
    for row in &data_lines(&out)[1..] {
        let cells: Vec<&str> = row.split(',').collect();
        let n: usize = cells[0].parse().unwrap();
        assert_eq!(cells[1].len(), n);
        words[n] += cells[2].parse::<u64>().unwrap();
    }
    for (n, &count) in words.iter().enumerate().skip(1) {
        let expected = 2i64.pow(n as u32) + 2 * (-1i64).pow(n as u32);
        assert_eq!(count as i64, expected, "n = {n}");
    }
}

#[test]
fn grid_zeros_reports_both_conventions() {
    let out =
        stdout(&szeta(&["--theta", "30", "--M", "9", "grid-zeros", "--x0", "0.1", "--ymax", "20", "--samples", "3"]));
    assert!(out.contains("count_symmetric: zeros with |Im s| <= y"));
    let rows = &data_lines(&out)[1..];
    assert_eq!(rows.len(), 3);
    let counts: Vec<i64> = rows.iter().map(|r| r.split(',').nth(2).unwrap().parse().unwrap()).collect();
    assert!(counts.windows(2).all(|w| w[0] <= w[1]));
}

#[test]
fn unvalidated_region_is_flagged() {
    let out = stdout(&szeta(&["--theta", "30", "--M", "6", "eval", "--re", "-0.5", "--im", "3"]));
    assert!(out.contains("# warning: Re s = -0.5"));
    let out = stdout(&szeta(&["--theta", "30", "--M", "6", "eval", "--re", "-0.2", "--im", "3"]));
    assert!(!out.contains("# warning:"));
}

#[test]
fn svd_profile_reports_fit() {
    let out = stdout(&szeta(&["--theta", "30", "svd-profile", "--degree", "24"]));
    let note = out.lines().find(|l| l.starts_with("# note: fit:")).unwrap();
    let ratio: f64 = note.split("ratio = ").nth(1).unwrap().split(',').next().unwrap().parse().unwrap();
    assert!(ratio > 0.0 && ratio < 1.0);
    assert_eq!(data_lines(&out).len(), 1 + 3 * (24 + 1));
}

#[test]
fn cache_is_reused() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().to_str().unwrap();
    let args = ["--theta", "30", "--M", "7", "--cache", cache, "eval", "--re", "0.5", "--im", "1"];
    let first = szeta(&args);
    assert!(String::from_utf8_lossy(&first.stderr).contains("cache: stored"));
    let second = szeta(&args);
    assert!(String::from_utf8_lossy(&second.stderr).contains("cache: loaded"));
    assert_eq!(data_lines(&stdout(&first)), data_lines(&stdout(&second)));
}

#[test]
fn output_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("eval.csv");
    let out =
        stdout(&szeta(&["--theta", "30", "--M", "5", "eval", "--re", "1", "--im", "0", "-o", path.to_str().unwrap()]));
    assert!(out.is_empty());
    let written = std::fs::read_to_string(path).unwrap();
    assert_eq!(data_lines(&written).len(), 2);
}
