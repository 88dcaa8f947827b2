//! Experiment layer: config parsing, written files read back, determinism
//! and the command-line exit codes.

use std::path::Path;
use std::process::Command;

use eda_lab::experiment::output::{read_csv, read_json, ComparisonRow, Metadata, TrajectoryRow, TrialRow};
use eda_lab::experiment::{cmd_bounds, cmd_compare, cmd_dynamics, cmd_simulate, ExperimentConfig, Format};
use eda_lab::theory::GridRow;
use eda_lab::{monte_carlo, run, SelectionSchema};

const BASE: &str = r#"
[problem]
kind = "onemax"
bits = 6

[selection]
selection = "truncation"
mu = 0.5

[engine]
max_iters = 100

[simulation]
population_size = 400
replications = 6
seed = 99

[bounds]
d0 = [0.5, 0.984375]
mu = [0.25, 0.5]
"#;

fn config(dir: &Path, format: Format) -> ExperimentConfig {
    ExperimentConfig::from_toml_str(BASE).unwrap().with_overrides(Some(dir.to_path_buf()), None, Some(format))
}

#[test]
fn trajectory_csv_and_json_round_trip() {
    let tmp = tempfile::tempdir().unwrap();
    let problem = eda_lab::Problem::onemax(6).unwrap();
    let traj = run(&eda_lab::LevelDistribution::uniform(&problem), &SelectionSchema::truncation(0.5).unwrap(), &problem, 100).unwrap();

    let cfg = config(tmp.path(), Format::Csv);
    cmd_dynamics(&cfg).unwrap();
    let (meta, rows): (Metadata, Vec<TrajectoryRow>) = read_csv(&tmp.path().join("trajectory.csv")).unwrap();
    assert_eq!(meta.config_sha256, cfg.hash());
    let ds: Vec<f64> = rows.iter().map(|r| r.d).collect();
    assert_eq!(ds, traj.d_values());

    let cfg = config(tmp.path(), Format::Json);
    cmd_dynamics(&cfg).unwrap();
    let (_, json_rows): (Metadata, Vec<TrajectoryRow>) = read_json(&tmp.path().join("trajectory.json")).unwrap();
    assert_eq!(json_rows, rows);
}

#[test]
fn simulation_files_match_memory() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = config(tmp.path(), Format::Csv);
    cmd_simulate(&cfg).unwrap();
    let summary = monte_carlo(&cfg.build_problem().unwrap(), &cfg.sim_config().unwrap().unwrap()).unwrap();

    let (meta, trials): (Metadata, Vec<TrialRow>) = read_csv(&tmp.path().join("trials.csv")).unwrap();
    assert_eq!(meta.base_seed, Some(99));
    assert!(meta.rng.is_some());
    for t in &summary.trials {
        let mine: Vec<f64> = trials.iter().filter(|r| r.replication == t.replication).map(|r| r.d_hat).collect();
        assert_eq!(mine, t.d_hat_trajectory);
    }
    let (_, cmp): (Metadata, Vec<ComparisonRow>) = read_csv(&tmp.path().join("comparison.csv")).unwrap();
    let err: Vec<f64> = cmp.iter().map(|r| r.mean_abs_error).collect();
    assert_eq!(err, summary.mean_abs_error);
}

#[test]
fn same_seed_gives_identical_bytes() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [a.path(), b.path()] {
        let cfg = config(dir, Format::Csv);
        cmd_simulate(&cfg).unwrap();
        cmd_compare(&cfg).unwrap();
    }
    for name in ["trials.csv", "comparison.csv", "summary.json", "compare.csv"] {
        let x = std::fs::read(a.path().join(name)).unwrap();
        let y = std::fs::read(b.path().join(name)).unwrap();
        assert_eq!(x, y, "{name}");
    }
}

#[test]
fn bounds_grid_file() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = config(tmp.path(), Format::Json);
    cmd_bounds(&cfg).unwrap();
    let (_, rows): (Metadata, Vec<GridRow>) = read_json(&tmp.path().join("bounds.json")).unwrap();
    assert_eq!(rows.len(), 4);
    assert!(rows.iter().all(|r| r.thm1_dominates_thm3 && r.thm2_dominates_thm4));
    assert_eq!(rows[3].thm3_tau_iterations, 6);
}

#[test]
fn empty_bounds_grid_is_header_only() {
    let tmp = tempfile::tempdir().unwrap();
    let text = BASE.replace("d0 = [0.5, 0.984375]", "d0 = []");
    let cfg = ExperimentConfig::from_toml_str(&text).unwrap().with_overrides(Some(tmp.path().to_path_buf()), None, None);
    cmd_bounds(&cfg).unwrap();
    let body = std::fs::read_to_string(tmp.path().join("bounds.csv")).unwrap();
    let data: Vec<&str> = body.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(data.len(), 1);
    assert!(data[0].starts_with("d0,mu"));
}

#[test]
fn overrides_change_the_hash() {
    let a = ExperimentConfig::from_toml_str(BASE).unwrap();
    let b = a.clone().with_overrides(None, Some(5), None);
    assert_ne!(a.hash(), b.hash());
    assert_eq!(b.simulation.unwrap().seed, 5);
    assert_eq!(a.hash(), ExperimentConfig::from_toml_str(BASE).unwrap().hash());
}

#[test]
fn invalid_configs_are_rejected() {
    for bad in [
        BASE.replace("mu = 0.5", "mu = 1.5"),
        BASE.replace("bits = 6", "bits = 0"),
        BASE.replace("kind = \"onemax\"", "kind = \"trap\""),
        BASE.replace("population_size = 400", "population_size = 0"),
    ] {
        let parsed = ExperimentConfig::from_toml_str(&bad).and_then(|c| c.validate().map(|_| c));
        let err = parsed.expect_err(&bad);
        assert_eq!(err.exit_code(), 2, "{err}");
    }
}

fn eda_lab(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_eda-lab")).args(args).env("EDA_LAB_THREADS", "2").output().unwrap()
}

#[test]
fn binary_exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().to_str().unwrap();
    let write = |name: &str, text: &str| {
        let p = tmp.path().join(name);
        std::fs::write(&p, text).unwrap();
        p.to_str().unwrap().to_string()
    };

    let good = write("good.toml", BASE);
    let r = eda_lab(&["dynamics", "--config", &good, "--out-dir", out]);
    assert_eq!(r.status.code(), Some(0), "{}", String::from_utf8_lossy(&r.stderr));
    assert!(tmp.path().join("trajectory.csv").exists());

    let r = eda_lab(&["bounds", "--config", &good, "--out-dir", out, "--format", "json"]);
    assert_eq!(r.status.code(), Some(0));
    assert!(tmp.path().join("bounds.json").exists());

    let bad = write("bad.toml", &BASE.replace("mu = 0.5", "mu = 0"));
    assert_eq!(eda_lab(&["dynamics", "--config", &bad, "--out-dir", out]).status.code(), Some(2));

    let fair = write("fair.toml", &BASE.replace("selection = \"truncation\"\nmu = 0.5", "selection = \"tournament\"\nties = \"fair\"").replace("max_iters = 100", "max_iters = 5"));
    assert_eq!(eda_lab(&["dynamics", "--config", &fair, "--out-dir", out]).status.code(), Some(3));

    let missing = tmp.path().join("nope.toml");
    assert_eq!(eda_lab(&["dynamics", "--config", missing.to_str().unwrap()]).status.code(), Some(1));
}
