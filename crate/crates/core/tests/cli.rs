mod common;

use std::path::PathBuf;

use common::{run_qrs, write_config};
use qrs::bench::{Cell, ExperimentConfig};
use qrs::bounds::{asymmetry_ratio, client_upper, epsilon_from_resources, hoeffding_ratio, BoundInputs};
use qrs::verify::required_k;
use rand::seq::IndexedRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const FIGS: [&str; 6] = ["3", "5", "6", "7", "8", "9"];
const ROWS_PER_FIGURE: usize = 100;

fn golden_path(fig: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(format!("fig{fig}.csv"))
}

fn curves_stdout(fig: &str) -> String {
    let out = run_qrs(&["curves", "--fig", fig], None);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

/// Default-config CSVs match the checked-in copies byte for byte. Set
/// `QRS_BLESS=1` to rewrite them after an intended change.
#[test]
fn curves_match_golden_files() {
    for fig in FIGS {
        let text = curves_stdout(fig);
        let path = golden_path(fig);
        if std::env::var_os("QRS_BLESS").is_some() {
            std::fs::create_dir_all(path.parent().unwrap()).unwrap();
            std::fs::write(&path, &text).unwrap();
        }
        let golden = std::fs::read_to_string(&path).unwrap();
        assert!(golden == text, "figure {fig} differs from {}", path.display());
    }
}

fn field(label: &str, key: &str) -> f64 {
    label
        .split('|')
        .find_map(|part| part.strip_prefix(key).and_then(|r| r.strip_prefix('=')))
        .and_then(|v| v.trim_end_matches("*eps").parse().ok())
        .unwrap_or_else(|| panic!("no {key} in {label}"))
}

/// Recomputes the expected cell of one row from the bound functions.
fn recompute(fig: &str, x: Cell, label: &str) -> Cell {
    let xf = x.as_f64().unwrap();
    match fig {
        "3" => {
            let delta = field(label, "delta");
            let d = field(label, "Delta");
            let tol = if label.ends_with("*eps") { d * xf } else { d };
            Cell::Int(8 * required_k(xf, delta, tol).unwrap())
        }
        "5" => Cell::Real(client_upper(&BoundInputs::new(field(label, "eps"), xf as u64, 1.0)).unwrap()),
        _ => {
            let (n, m) = if fig == "6" || fig == "8" {
                (xf as u64, field(label, "M") as u64)
            } else {
                (field(label, "N") as u64, xf as u64)
            };
            let inputs = BoundInputs::new(epsilon_from_resources(n / 8, 0.0, 1e-6).unwrap(), m, 1.0);
            let r = if fig == "8" || fig == "9" {
                hoeffding_ratio(&inputs.with_s_tilde(2.0)).unwrap()
            } else {
                asymmetry_ratio(&inputs).unwrap()
            };
            Cell::Real(r.unwrap())
        }
    }
}

#[test]
fn random_rows_recompute_from_bounds() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for fig in FIGS {
        let text = curves_stdout(fig);
        let rows: Vec<&str> = text.lines().skip(1).collect();
        let picked: Vec<&&str> = rows.choose_multiple(&mut rng, ROWS_PER_FIGURE.min(rows.len())).collect();
        for row in picked {
            let cols: Vec<&str> = row.split(',').collect();
            let x = Cell::parse(cols[0]).unwrap();
            let expect = recompute(fig, x, cols[1]);
            assert_eq!(cols[2], expect.to_string(), "figure {fig} row {row}");
        }
    }
}

#[test]
fn rows_sorted_by_series_then_x() {
    for fig in FIGS {
        let text = curves_stdout(fig);
        let keys: Vec<(String, f64)> = text
            .lines()
            .skip(1)
            .map(|l| {
                let c: Vec<&str> = l.split(',').collect();
                (c[1].to_string(), Cell::parse(c[0]).unwrap().as_f64().unwrap())
            })
            .collect();
        assert!(keys.windows(2).all(|w| w[0].0 < w[1].0 || (w[0].0 == w[1].0 && w[0].1 < w[1].1)), "figure {fig}");
    }
}

#[test]
fn sentinel_rows_warn_on_stderr() {
    let out = run_qrs(&["curves", "--fig", "6", "--set", "sweep={\"variable\":\"N\",\"values\":[8,8000]}"], None);
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.lines().any(|l| l.ends_with(",inapplicable")));
    assert!(String::from_utf8_lossy(&out.stderr).contains("warning"));
}

#[test]
fn out_flag_and_config_output_path_agree() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("f5.csv");
    let cfg = write_config(
        dir.path(),
        "c.json",
        &format!(r#"{{"command": "curves", "output_path": {:?}}}"#, target.to_str().unwrap()),
    );
    let out = run_qrs(&["curves", "--fig", "5", "--config", cfg.to_str().unwrap()], None);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    assert_eq!(std::fs::read_to_string(&target).unwrap(), curves_stdout("5"));
}

#[test]
fn invalid_invocations_fail() {
    let dir = tempfile::tempdir().unwrap();
    assert!(!run_qrs(&["curves", "--fig", "4"], None).status.success());
    assert!(!run_qrs(&["curves", "--fig", "10"], None).status.success());
    let cfg = write_config(dir.path(), "c.json", r#"{"command": "simulate"}"#);
    let out = run_qrs(&["curves", "--fig", "3", "--config", cfg.to_str().unwrap()], None);
    assert_eq!(out.status.code(), Some(2));
    let bad = write_config(dir.path(), "bad.json", r#"{"sweep": {"variable": "M", "values": [5, 1]}}"#);
    assert_eq!(run_qrs(&["curves", "--fig", "5", "--config", bad.to_str().unwrap()], None).status.code(), Some(2));
    assert_eq!(run_qrs(&["simulate"], None).status.code(), Some(2));
    let out = run_qrs(&["curves", "--fig", "3"], Some(0));
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_refuses_with_runtime_estimate() {
    let out = run_qrs(&["verify", "--set", "verify={\"soundness_k\":[1000000]}"], None);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("estimated runtime"));
}

#[test]
fn verify_exit_status_reflects_report() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("r.json");
    let out = run_qrs(
        &[
            "verify",
            "--seed",
            "3",
            "--out",
            report.to_str().unwrap(),
            "--set",
            r#"verify={"completeness_k":[10],"soundness_k":[100],"soundness_trials":1000,"rms_M":[100]}"#,
        ],
        None,
    );
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(report).unwrap()).unwrap();
    let passed = v["passed"].as_bool().unwrap();
    let all = v["suites"]
        .as_array()
        .unwrap()
        .iter()
        .flat_map(|s| s["checks"].as_array().unwrap().iter())
        .all(|c| c["passed"].as_bool().unwrap());
    assert_eq!(passed, all);
    assert_eq!(out.status.success(), passed);
    assert_eq!(v["suites"].as_array().unwrap().len(), 4);
}

#[test]
fn simulate_summary_matches_library() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("sim");
    let out = run_qrs(
        &["simulate", "--seed", "4", "--out", out_dir.to_str().unwrap(), "--set", "k=7", "--set", "delta=1", "--set", "M=50", "--set", "trials=2"],
        None,
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let cfg = ExperimentConfig::default()
        .with_overrides(&["k=7", "delta=1", "M=50", "trials=2"])
        .unwrap();
    let lib_dir = dir.path().join("lib");
    let runs = qrs::bench::simulate(&cfg, 4, &lib_dir).unwrap();
    assert_eq!(runs.len(), 2);
    for f in [qrs::bench::TRANSCRIPTS, qrs::bench::SERVER_TRANSCRIPTS, qrs::bench::SUMMARY] {
        assert_eq!(std::fs::read(out_dir.join(f)).unwrap(), std::fs::read(lib_dir.join(f)).unwrap(), "{f}");
    }
}
