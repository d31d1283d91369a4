use std::path::Path;
use std::process::Command;

use mott_kinetics_cli::run::{snapshot_path, TRAJECTORY_HEADER};
use mott_kinetics_cli::snapshot::Snapshot;
use mott_kinetics_cli::{parse_config, run};
use serde_json::json;

fn config(out: &Path, init: serde_json::Value, integrate: serde_json::Value) -> serde_json::Value {
    json!({
        "model": {"U": 10.0, "dim": 2, "grid_sizes": [4, 4]},
        "kernel": {"regime": "strong", "eta": 0.3},
        "init": init,
        "integrate": integrate,
        "output": {"directory": out},
        "threads": 2
    })
}

fn pump() -> serde_json::Value {
    json!({"kind": "pump_bump", "center": 0.0, "width": 0.3, "amplitude": 0.4})
}

fn rows(path: &Path) -> Vec<Vec<f64>> {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some(TRAJECTORY_HEADER));
    lines
        .map(|l| {
            l.split(',')
                .map(|x| {
                    if x.is_empty() {
                        f64::NAN
                    } else {
                        x.parse().unwrap()
                    }
                })
                .collect()
        })
        .collect()
}

#[test]
fn zero_final_time_writes_one_row() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), pump(), json!({"dt": 0.01, "t_final": 0.0}));
    let summary = run(&parse_config(&cfg.to_string()).unwrap()).unwrap();
    assert_eq!(summary.steps, 0);
    let data = rows(&summary.trajectory);
    assert_eq!(data.len(), 1);
    assert_eq!(data[0].len(), 11);
    assert!(
        data[0][7].is_finite(),
        "Ddot is reported for the strong regime"
    );
}

#[test]
fn weak_regime_leaves_ddot_empty() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = config(dir.path(), pump(), json!({"dt": 0.01, "t_final": 0.02}));
    cfg["kernel"] = json!({"regime": "weak", "eta": 0.3});
    let summary = run(&parse_config(&cfg.to_string()).unwrap()).unwrap();
    let data = rows(&summary.trajectory);
    assert_eq!(data.len(), 3);
    assert!(data.iter().all(|r| r[7].is_nan()));
}

#[test]
fn snapshot_round_trip_is_bitwise() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("first");
    let mut cfg = config(&first, pump(), json!({"dt": 0.01, "t_final": 0.05}));
    cfg["output"]["snapshot_stride"] = json!(5);
    let summary = run(&parse_config(&cfg.to_string()).unwrap()).unwrap();
    assert_eq!(
        summary.snapshots,
        vec![snapshot_path(&first, 0), snapshot_path(&first, 5)]
    );
    let original = Snapshot::read(&snapshot_path(&first, 5)).unwrap();

    let second = dir.path().join("second");
    let init = json!({"kind": "custom_file", "path": snapshot_path(&first, 5)});
    let mut cfg = config(&second, init, json!({"dt": 0.01, "t_final": 0.0}));
    cfg["output"]["snapshot_stride"] = json!(1);
    run(&parse_config(&cfg.to_string()).unwrap()).unwrap();
    let reloaded = Snapshot::read(&snapshot_path(&second, 0)).unwrap();
    assert_eq!(reloaded.t.to_bits(), original.t.to_bits());
    assert!(reloaded
        .f
        .iter()
        .zip(&original.f)
        .all(|(a, b)| a.to_bits() == b.to_bits()));
    assert_eq!(reloaded.f.len(), 4 * 16);
}

#[test]
fn equilibrium_run_does_not_move_away() {
    let dir = tempfile::tempdir().unwrap();
    let init = json!({"kind": "equilibrium", "alpha_plus": 2.0, "alpha_minus": -2.0, "beta": 1.0});
    let cfg = config(
        dir.path(),
        init,
        json!({"dt": 0.01, "t_final": 1.0, "output_every": 10, "ddot": false}),
    );
    let summary = run(&parse_config(&cfg.to_string()).unwrap()).unwrap();
    let data = rows(&summary.trajectory);
    assert_eq!(data.len(), 11);
    let (first, last) = (data[0][10], data[data.len() - 1][10]);
    assert!(last <= first, "{last:e} > {first:e}");
}

#[test]
fn custom_file_with_wrong_grid_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let snap = dir.path().join("snap.json");
    let mut cfg = config(dir.path(), pump(), json!({"dt": 0.01, "t_final": 0.0}));
    cfg["output"]["snapshot_stride"] = json!(1);
    run(&parse_config(&cfg.to_string()).unwrap()).unwrap();
    std::fs::rename(snapshot_path(dir.path(), 0), &snap).unwrap();

    let mut cfg = config(
        dir.path(),
        json!({"kind": "custom_file", "path": snap}),
        json!({"dt": 0.01, "t_final": 0.0}),
    );
    cfg["model"]["grid_sizes"] = json!([4, 6]);
    let err = run(&parse_config(&cfg.to_string()).unwrap()).unwrap_err();
    assert!(err.to_string().starts_with("init.path:"), "{err}");
}

fn binary() -> Command {
    Command::new(env!("CARGO_BIN_EXE_mott-kinetics"))
}

#[test]
fn spectrum_subcommand_reports_gap_minimum() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("config.json");
    let mut cfg = config(dir.path(), pump(), json!({"dt": 0.01, "t_final": 1.0}));
    cfg["model"]["grid_sizes"] = json!([8, 8]);
    std::fs::write(&cfg_path, cfg.to_string()).unwrap();
    let out = dir.path().join("spectrum.csv");
    let status = binary()
        .args(["spectrum", "--config"])
        .arg(&cfg_path)
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap()
        .status;
    assert!(status.success());
    let text = std::fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("index,k_0,k_1,J_k,E_minus,E_plus,gap"));
    let gaps: Vec<f64> = lines
        .map(|l| l.rsplit(',').next().unwrap().parse().unwrap())
        .collect();
    assert_eq!(gaps.len(), 64);
    assert_eq!(gaps.iter().cloned().fold(f64::INFINITY, f64::min), 10.0);
}

#[test]
fn run_subcommand_reports_config_errors() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("config.json");
    let mut cfg = config(dir.path(), pump(), json!({"dt": 0.01, "t_final": 1.0}));
    cfg["model"]["grid_sizes"] = json!([1, 8]);
    std::fs::write(&cfg_path, cfg.to_string()).unwrap();
    let out = binary()
        .args(["run", "--config"])
        .arg(&cfg_path)
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("model.grid_sizes"));
}

#[test]
fn unknown_subcommand_prints_usage() {
    let out = binary().arg("frobnicate").output().unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
}

#[test]
fn version_flag() {
    let out = binary().arg("--version").output().unwrap();
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains(env!("CARGO_PKG_VERSION")));
}

#[test]
fn quick_validation_passes() {
    let out = binary().args(["validate", "--quick"]).output().unwrap();
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(out.status.success(), "{stdout}");
    assert!(!stdout.contains("FAIL"));
}
