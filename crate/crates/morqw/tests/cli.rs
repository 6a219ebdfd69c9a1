//! End-to-end tests of the `morqw` binary: command grammar, precedence,
//! output formats, exit codes, and reproducibility across worker counts.

use std::io::Write;
use std::path::Path;
use std::process::{Command, Output};

fn morqw() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_morqw"));
    // Keep tests hermetic against the ambient environment.
    cmd.env_remove("MORQW_WORKERS");
    cmd
}

fn run(args: &[&str]) -> Output {
    morqw().args(args).output().expect("binary runs")
}

fn stdout_str(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).expect("stdout is UTF-8")
}

fn stderr_str(output: &Output) -> String {
    String::from_utf8(output.stderr.clone()).expect("stderr is UTF-8")
}

fn assert_exit(output: &Output, code: i32) {
    assert_eq!(
        output.status.code(),
        Some(code),
        "expected exit {code}; stderr:\n{}",
        stderr_str(output)
    );
}

fn parse_json(output: &Output) -> serde_json::Value {
    serde_json::from_str(&stdout_str(output)).expect("stdout is JSON")
}

/// Splits a CSV document into (header, rows-of-fields).
fn parse_csv(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = text.lines();
    let header: Vec<String> = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines
        .map(|l| l.split(',').map(String::from).collect())
        .collect();
    (header, rows)
}

fn column(header: &[String], rows: &[Vec<String>], name: &str) -> Vec<f64> {
    let idx = header.iter().position(|h| h == name).expect("column exists");
    rows.iter().map(|r| r[idx].parse().unwrap()).collect()
}

#[test]
fn point_defaults_to_full_transmission_at_zero_depth() {
    let output = run(&["point"]);
    assert_exit(&output, 0);
    let json = parse_json(&output);
    assert_eq!(json["t_x"].as_f64().unwrap(), 1.0);
    assert_eq!(json["t_y"].as_f64().unwrap(), 0.0);
    assert_eq!(json["status"], "ok");
}

#[test]
fn point_on_preset_base_reproduces_strong_rotation() {
    let output = run(&["point", "--figure", "fig6", "--set", "delta_b=7"]);
    assert_exit(&output, 0);
    let json = parse_json(&output);
    // fig6 contributes αl = 45 and the analytic strategy.
    let t_y = json["t_y"].as_f64().unwrap();
    assert!(
        (t_y - 0.801_037_373_000_421).abs() < 1e-4,
        "t_y = {t_y}"
    );
    assert!(json["t_x"].as_f64().unwrap() < 0.01);
    assert!(json["residual"].as_f64().unwrap() == 0.0);
}

#[test]
fn point_with_dead_probe_fails_with_exit_3() {
    let output = run(&["point", "--set", "omega_plus=0"]);
    assert_exit(&output, 3);
    assert!(
        stderr_str(&output).contains("ZeroProbe"),
        "stderr: {}",
        stderr_str(&output)
    );
}

#[test]
fn detuning_mismatch_is_a_config_error() {
    let output = run(&["point", "--set", "delta_p=1"]);
    assert_exit(&output, 2);
    assert!(stderr_str(&output).contains("MultiPhotonViolation"));
}

#[test]
fn point_rejects_explicit_axes() {
    let output = run(&["point", "--set", "axis1=delta_b:0:10:11"]);
    assert_exit(&output, 2);
    assert!(stderr_str(&output).contains("morqw sweep"));
}

#[test]
fn sweep_fig6_reproduces_the_transmission_peak() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fig6.csv");
    let output = run(&["sweep", "--figure", "fig6", "--out", path.to_str().unwrap()]);
    assert_exit(&output, 0);

    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 502, "header + 501 rows");
    let (header, rows) = parse_csv(&text);
    assert_eq!(header.first().unwrap(), "axis1");
    assert_eq!(header.last().unwrap(), "status");
    assert!(rows.iter().all(|r| r.last().unwrap() == "ok"));

    let axis = column(&header, &rows, "axis1");
    let t_y = column(&header, &rows, "t_y");
    let (peak_at, peak) = axis
        .iter()
        .zip(&t_y)
        .fold((f64::NAN, f64::NEG_INFINITY), |best, (&x, &v)| {
            if v > best.1 {
                (x, v)
            } else {
                best
            }
        });
    assert!(
        (0.78..=0.82).contains(&peak),
        "t_y peak {peak} outside 0.80 ± 0.02"
    );
    assert!(
        (6.5..=8.0).contains(&peak_at),
        "t_y peak at ΔB = {peak_at}, expected near 7"
    );
}

#[test]
fn csv_fields_round_trip_byte_for_byte() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fig6.csv");
    assert_exit(
        &run(&["sweep", "--figure", "fig6", "--out", path.to_str().unwrap()]),
        0,
    );
    let text = std::fs::read_to_string(&path).unwrap();
    for line in text.lines().skip(1) {
        for field in line.split(',').take(11) {
            let value: f64 = field.parse().unwrap();
            assert_eq!(format!("{value:.16e}"), field, "field loses precision");
        }
    }
}

#[test]
fn sweep_fig5_is_transparent_at_quadrature_phases() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fig5.csv");
    assert_exit(
        &run(&["sweep", "--figure", "fig5", "--out", path.to_str().unwrap()]),
        0,
    );
    let (header, rows) = parse_csv(&std::fs::read_to_string(&path).unwrap());
    let im_plus = column(&header, &rows, "im_s_plus");
    let re_plus = column(&header, &rows, "re_s_plus");
    let t_x = column(&header, &rows, "t_x");
    for idx in [125usize, 375] {
        let magnitude = (re_plus[idx].powi(2) + im_plus[idx].powi(2)).sqrt();
        assert!(magnitude < 1e-8, "|S+| = {magnitude:e} at row {idx}");
        assert!(t_x[idx] >= 1.0 - 1e-6, "t_x = {} at row {idx}", t_x[idx]);
    }
}

#[test]
fn sweep_supports_json_format() {
    let output = run(&[
        "sweep",
        "--figure",
        "fig6",
        "--format",
        "json",
    ]);
    assert_exit(&output, 0);
    let json = parse_json(&output);
    let records = json.as_array().unwrap();
    assert_eq!(records.len(), 501);
    assert_eq!(records[0]["axis1"].as_f64().unwrap(), 0.0);
    assert_eq!(records[0]["status"], "ok");
}

#[test]
fn usage_errors_exit_2() {
    let cases: &[&[&str]] = &[
        &["sweep", "--figure", "fig9"],
        &["sweep"],
        &["sweep", "--set", "axis1=delta_b:5:5:11"],
        &["sweep", "--set", "bogus=1"],
        &["sweep", "--set", "delta_b=nan"],
        &["sweep", "--figure", "fig2"],
        &["figure"],
        &["sweep", "--figure", "fig6", "--workers", "0"],
        &["sweep", "--figure", "fig6", "--method", "exact"],
    ];
    for args in cases {
        let output = run(args);
        assert_exit(&output, 2);
    }
}

#[test]
fn figure_fig3_writes_six_named_tables() {
    let dir = tempfile::tempdir().unwrap();
    let output = run(&["figure", "--figure", "fig3", "--out", dir.path().to_str().unwrap()]);
    assert_exit(&output, 0);

    let expected = [
        "fig3_gamma21-0_al-30.csv",
        "fig3_gamma21-0_al-58.csv",
        "fig3_gamma21-0_al-85.csv",
        "fig3_gamma21-0.05_al-30.csv",
        "fig3_gamma21-0.05_al-58.csv",
        "fig3_gamma21-0.05_al-85.csv",
    ];
    let mut found: Vec<String> = std::fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    found.sort();
    let mut expected_sorted: Vec<String> = expected.iter().map(|s| s.to_string()).collect();
    expected_sorted.sort();
    assert_eq!(found, expected_sorted);

    let stdout = stdout_str(&output);
    assert_eq!(stdout.matches("wrote ").count(), 6);

    // The complete-rotation table: Δ = 0 row transmits almost fully into y.
    let text =
        std::fs::read_to_string(dir.path().join("fig3_gamma21-0_al-58.csv")).unwrap();
    let (header, rows) = parse_csv(&text);
    assert_eq!(rows.len(), 501);
    let t_y = column(&header, &rows, "t_y");
    assert!(t_y[250] > 0.8, "t_y(Δ=0) = {}", t_y[250]);
}

#[test]
fn figure_fig7_honors_axis_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let output = run(&[
        "figure",
        "--figure",
        "fig7",
        "--set",
        "axis1=delta_b:0:10:21",
        "--set",
        "axis2=alpha_l:0:100:11",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_exit(&output, 0);
    let text = std::fs::read_to_string(dir.path().join("fig7.csv")).unwrap();
    assert_eq!(text.lines().count(), 1 + 21 * 11);
    let (header, rows) = parse_csv(&text);
    assert_eq!(header[1], "axis2");
    // Outer-major ordering: the inner depth axis cycles fastest.
    assert_eq!(rows[0][0], rows[10][0]);
    assert_ne!(rows[0][1], rows[10][1]);
    assert_ne!(rows[10][0], rows[11][0]);
}

#[test]
fn method_precedence_is_config_then_set_then_flag() {
    // The closed form rejects excited-state dephasing, so each step that
    // switches the method flips the outcome.
    let dir = tempfile::tempdir().unwrap();
    let config_path = dir.path().join("scenario.conf");
    let mut file = std::fs::File::create(&config_path).unwrap();
    writeln!(file, "method = analytic").unwrap();
    writeln!(file, "gamma_d_43 = 0.05").unwrap();
    drop(file);
    let config = config_path.to_str().unwrap();

    let output = run(&["point", "--config", config]);
    assert_exit(&output, 3);
    assert!(stderr_str(&output).contains("RegimeViolation"));

    let output = run(&["point", "--config", config, "--set", "method=numeric"]);
    assert_exit(&output, 0);

    let output = run(&[
        "point", "--config", config, "--set", "method=numeric", "--method", "analytic",
    ]);
    assert_exit(&output, 3);

    let output = run(&["point", "--config", config, "--method", "numeric"]);
    assert_exit(&output, 0);
}

#[test]
fn json_config_files_are_accepted() {
    let dir = tempfile::tempdir().unwrap();
    let config_path = dir.path().join("scenario.json");
    std::fs::write(
        &config_path,
        r#"{"delta_b": 7, "alpha_l": 45, "method": "analytic"}"#,
    )
    .unwrap();
    let output = run(&["point", "--config", config_path.to_str().unwrap()]);
    assert_exit(&output, 0);
    let t_y = parse_json(&output)["t_y"].as_f64().unwrap();
    assert!((t_y - 0.801_037_373_000_421).abs() < 1e-12, "t_y = {t_y}");
}

#[test]
fn missing_config_file_exits_2() {
    let output = run(&["point", "--config", "/no/such/scenario.conf"]);
    assert_exit(&output, 2);
}

#[test]
fn results_are_identical_for_any_worker_count() {
    let dir = tempfile::tempdir().unwrap();
    let single = dir.path().join("w1.csv");
    let triple = dir.path().join("w3.csv");
    let env_driven = dir.path().join("env.csv");

    // fig2 is numeric and multi-variant, so exercise fig6 (single table)
    // plus an explicit numeric sweep for the parallel path.
    let base: &[&str] = &[
        "sweep",
        "--set",
        "axis1=delta:-20:20:201",
        "--set",
        "delta_b=9",
        "--set",
        "gamma_d_43=0.05",
    ];
    assert_exit(
        &morqw()
            .args(base)
            .args(["--workers", "1", "--out", single.to_str().unwrap()])
            .output()
            .unwrap(),
        0,
    );
    assert_exit(
        &morqw()
            .args(base)
            .args(["--workers", "3", "--out", triple.to_str().unwrap()])
            .output()
            .unwrap(),
        0,
    );
    assert_exit(
        &morqw()
            .args(base)
            .args(["--out", env_driven.to_str().unwrap()])
            .env("MORQW_WORKERS", "2")
            .output()
            .unwrap(),
        0,
    );

    let reference = std::fs::read(&single).unwrap();
    assert_eq!(reference, std::fs::read(&triple).unwrap());
    assert_eq!(reference, std::fs::read(&env_driven).unwrap());
}

#[test]
fn invalid_worker_environment_exits_2() {
    let output = morqw()
        .args(["sweep", "--figure", "fig6"])
        .env("MORQW_WORKERS", "three")
        .output()
        .unwrap();
    assert_exit(&output, 2);
    assert!(stderr_str(&output).contains("MORQW_WORKERS"));
}

#[test]
fn unwritable_output_exits_4() {
    let output = run(&[
        "sweep",
        "--figure",
        "fig6",
        "--out",
        "/nonexistent-root/fig6.csv",
    ]);
    assert_exit(&output, 4);
    assert!(stderr_str(&output).contains("cannot write"));
}

fn assert_file_rows(path: &Path, rows: usize) {
    let text = std::fs::read_to_string(path).unwrap();
    assert_eq!(text.lines().count(), rows, "{}", path.display());
}

#[test]
fn figure_respects_depth_and_format_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let output = run(&[
        "figure",
        "--figure",
        "fig3",
        "--set",
        "alpha_l=58",
        "--format",
        "json",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_exit(&output, 0);
    // A pinned depth collapses the depth list to one table per variant.
    let mut found: Vec<String> = std::fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    found.sort();
    assert_eq!(
        found,
        vec![
            "fig3_gamma21-0.05_al-58.json".to_string(),
            "fig3_gamma21-0_al-58.json".to_string(),
        ]
    );
    let json: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(dir.path().join("fig3_gamma21-0_al-58.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(json.as_array().unwrap().len(), 501);

    // CSV default keeps the full depth list.
    let csv_dir = tempfile::tempdir().unwrap();
    assert_exit(
        &run(&["figure", "--figure", "fig6", "--out", csv_dir.path().to_str().unwrap()]),
        0,
    );
    assert_file_rows(&csv_dir.path().join("fig6_al-45.csv"), 502);
}
