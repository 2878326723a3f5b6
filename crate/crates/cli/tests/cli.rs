//! Behavior tests for the command-line surface: exit codes, output
//! shapes, determinism and config-file precedence.

use std::path::PathBuf;
use std::process::{Command, Output};

fn cavres(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cavres"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_str(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 output")
}

fn tmp_path(name: &str) -> PathBuf {
    std::env::temp_dir().join(format!("cavres_cli_{}_{name}", std::process::id()))
}

#[test]
fn evolve_default_grid_shape_and_initial_value() {
    let out = cavres(&["evolve"]);
    assert!(out.status.success());
    let text = stdout_str(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 602); // header + 601 rows
    assert!(lines[0].starts_with("gamma,kappa_t,c2_c1c2"));
    let first: Vec<f64> = lines[1].split(',').map(|v| v.parse().unwrap()).collect();
    assert_eq!(first.len(), 13);
    assert!(
        (first[2] - 0.36).abs() <= 1e-12,
        "c2_c1c2(0) = {}",
        first[2]
    );
}

#[test]
fn evolve_single_point() {
    let out = cavres(&["evolve", "--t-steps", "1", "--t-min", "0", "--t-max", "0"]);
    assert!(out.status.success());
    let text = stdout_str(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    let row: Vec<f64> = lines[1].split(',').map(|v| v.parse().unwrap()).collect();
    let e_bb = row[8];
    assert!(e_bb.abs() <= 1e-10);
}

#[test]
fn evolve_output_is_deterministic() {
    let args = [
        "evolve",
        "--t-steps",
        "50",
        "--t-max",
        "3.0",
        "--gamma",
        "0.7",
    ];
    let a = cavres(&args);
    let b = cavres(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn evolve_csv_round_trips_to_the_computed_values() {
    use cavres::dynamics::scan_grid;
    use cavres::states::EffectiveParams;
    let out = cavres(&["evolve", "--t-steps", "25", "--t-max", "2.0"]);
    assert!(out.status.success());
    let text = stdout_str(&out);
    let p = EffectiveParams::reference_example();
    let ts: Vec<f64> = (0..25).map(|k| 2.0 * k as f64 / 24.0).collect();
    let rows = scan_grid(&p, &ts, &[0.0]).unwrap();
    for (line, row) in text.lines().skip(1).zip(&rows) {
        let parsed: Vec<f64> = line.split(',').map(|v| v.parse().unwrap()).collect();
        let r = &row.report;
        let expected = [
            row.gamma,
            row.kappa_t,
            r.c2_c1c2,
            r.c2_r1r2,
            r.c2_c1r1,
            r.c2_c2r2,
            r.c2_c1r2,
            r.c2_c2r1,
            r.e_bb,
            r.e_qb_c1,
            r.e_qb_r1,
            r.e_ms,
            r.c2_block,
        ];
        for (a, b) in parsed.iter().zip(expected) {
            assert!((a - b).abs() <= 1e-12, "round trip {a} vs {b}");
        }
    }
}

#[test]
fn evolve_json_has_the_same_fields() {
    let out = cavres(&[
        "evolve",
        "--t-steps",
        "3",
        "--t-max",
        "1.0",
        "--format",
        "json",
    ]);
    assert!(out.status.success());
    let rows: serde_json::Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    let rows = rows.as_array().unwrap();
    assert_eq!(rows.len(), 3);
    for name in [
        "gamma", "kappa_t", "c2_c1c2", "c2_r1r2", "c2_c1r1", "c2_c2r2", "c2_c1r2", "c2_c2r1",
        "e_bb", "e_qb_c1", "e_qb_r1", "e_ms", "c2_block",
    ] {
        assert!(rows[0].get(name).is_some(), "missing field {name}");
    }
    assert!((rows[0]["c2_c1c2"].as_f64().unwrap() - 0.36).abs() <= 1e-12);
}

#[test]
fn times_reports_the_reference_values() {
    let out = cavres(&["times"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    assert!((v["esd_c1c2"].as_f64().unwrap() - 1.5f64.ln()).abs() <= 1e-9);
    assert!((v["esb_r1r2"].as_f64().unwrap() - 3f64.ln()).abs() <= 1e-9);
    assert!((v["gamma_window"].as_f64().unwrap() - 1.23096).abs() <= 1e-4);
    assert!((v["gamma_route"].as_f64().unwrap() - 1.91063).abs() <= 1e-4);
    let plateau = &v["plateau"];
    assert!((plateau["width"].as_f64().unwrap() - 2f64.ln()).abs() <= 1e-9);
}

#[test]
fn times_scales_with_kappa() {
    let out = cavres(&["times", "--kappa", "2.0"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    assert!((v["esd_c1c2"].as_f64().unwrap() - 1.5f64.ln() / 2.0).abs() <= 1e-9);
}

#[test]
fn times_absent_events_are_null() {
    let out = cavres(&["times", "--gamma", "3.0"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    assert!(v["esd_c1c2"].is_null());
    assert!(v["plateau"].is_null());

    let sqrt_half = (0.5f64).sqrt();
    let out = cavres(&[
        "times",
        "--alpha",
        &sqrt_half.to_string(),
        "--beta",
        &sqrt_half.to_string(),
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    assert!(v["esd_c1c2"].is_null());
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(cavres(&["figure", "zz"]).status.code(), Some(2));
    assert_eq!(cavres(&["evolve", "--gamma", "9.0"]).status.code(), Some(2));
    assert_eq!(cavres(&["evolve", "--t-steps", "0"]).status.code(), Some(2));
    assert_eq!(
        cavres(&["evolve", "--t-min", "2.0", "--t-max", "1.0"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        cavres(&["evolve", "--alpha", "0.5", "--beta", "0.5"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(cavres(&["nonsense"]).status.code(), Some(2));
}

#[test]
fn out_flag_writes_the_file() {
    let path = tmp_path("out.csv");
    let out = cavres(&[
        "evolve",
        "--t-steps",
        "2",
        "--t-max",
        "1.0",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 3);
    std::fs::remove_file(&path).ok();
}

#[test]
fn config_file_applies_and_flags_win() {
    let path = tmp_path("config.txt");
    std::fs::write(
        &path,
        "# scan setup\ngamma = 1.0\nt_steps = 4\nt_max = 2.0\n",
    )
    .unwrap();

    // File value used when no flag is given.
    let out = cavres(&["evolve", "--config", path.to_str().unwrap()]);
    assert!(out.status.success());
    let text = stdout_str(&out);
    assert_eq!(text.lines().count(), 5);
    let first: Vec<f64> = text
        .lines()
        .nth(1)
        .unwrap()
        .split(',')
        .map(|v| v.parse().unwrap())
        .collect();
    assert!((first[0] - 1.0).abs() <= 1e-15, "gamma from file");

    // Flag beats the file.
    let out = cavres(&[
        "evolve",
        "--config",
        path.to_str().unwrap(),
        "--gamma",
        "0.5",
    ]);
    assert!(out.status.success());
    let first: Vec<f64> = stdout_str(&out)
        .lines()
        .nth(1)
        .unwrap()
        .split(',')
        .map(|v| v.parse().unwrap())
        .collect();
    assert!((first[0] - 0.5).abs() <= 1e-15, "gamma from flag");
    std::fs::remove_file(&path).ok();
}

#[test]
fn unknown_config_key_exits_2() {
    let path = tmp_path("bad_config.txt");
    std::fs::write(&path, "alphaa = 0.5\n").unwrap();
    assert_eq!(
        cavres(&["evolve", "--config", path.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
    std::fs::remove_file(&path).ok();
}

#[test]
fn check_minimal_run_passes() {
    let out = cavres(&["check", "--seed", "7", "--samples", "2"]);
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = stdout_str(&out);
    for suite in ["qmath", "states", "measures", "dynamics", "reservoir"] {
        assert!(
            text.lines()
                .any(|l| l.contains(suite) && l.contains("PASS")),
            "suite {suite} missing or failed:\n{text}"
        );
    }
}

#[test]
fn reservoir_validate_coarse_grid_fails_with_exit_1() {
    // Coarse case: 50 modes over a 40 kappa band.
    let out = cavres(&[
        "reservoir-validate",
        "--n-modes",
        "50",
        "--bandwidth-over-kappa",
        "40",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    assert!(v["amplitude_deviation"].as_f64().unwrap() > 5e-3);
    assert_eq!(v["passed"].as_bool(), Some(false));
}

#[test]
fn reservoir_validate_beyond_horizon_exits_2() {
    // Horizon for delta = 0.8 kappa is 2 pi / 0.8 ~ 7.85.
    let out = cavres(&[
        "reservoir-validate",
        "--n-modes",
        "50",
        "--bandwidth-over-kappa",
        "40",
        "--t-max",
        "10",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn figure_binary_output_matches_library_path() {
    use cavres_cli::commands::{figure_csv, figure_grid_defaults, FigureId};
    use cavres_cli::config::RunConfig;
    let out = cavres(&["figure", "4d"]);
    assert!(out.status.success());
    let cfg = RunConfig::resolve(figure_grid_defaults(FigureId::F4d), None).unwrap();
    let expected = figure_csv(FigureId::F4d, &cfg).unwrap();
    assert_eq!(out.stdout, expected);
}
