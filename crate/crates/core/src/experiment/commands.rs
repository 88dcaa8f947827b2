use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use super::output::{
    self, fmt_opt, ComparisonRow, Metadata, TrajectoryRow, TrialRow, COMPARISON_HEADER, GRID_HEADER,
    REPORT_HEADER, TRAJECTORY_HEADER, TRIAL_HEADER,
};
use super::{ExperimentConfig, ExperimentError, Format, Result};
use crate::dynamics::{self, Trajectory};
use crate::selection::SelectionSchema;
use crate::simulator::{self, MonteCarloSummary, RNG_DESCRIPTION};
use crate::theory::{self, BoundReport};

/// What a command produced.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub files: Vec<PathBuf>,
    /// Human-readable summary for the terminal.
    pub summary: String,
    /// Set when the engine or some trial hit its iteration cap.
    pub not_converged: Option<String>,
}

fn closed_form(schema: &SelectionSchema, d0: f64, n: usize) -> Option<f64> {
    match *schema {
        SelectionSchema::Truncation { mu } => theory::lemma4_closed_form(d0, mu, n).ok(),
        SelectionSchema::TournamentPaperLiteral => theory::lemma5_closed_form(d0, n).ok(),
        SelectionSchema::TournamentTieFair => Some(theory::tie_fair_closed_form(d0, n)),
    }
}

/// Rows of `trajectory.csv` for an engine run.
pub fn trajectory_rows(traj: &Trajectory) -> Vec<TrajectoryRow> {
    traj.d_values()
        .into_iter()
        .enumerate()
        .map(|(n, d)| {
            let rec = traj.records.get(n);
            TrajectoryRow {
                n,
                d,
                realized_drift: rec.map(|r| r.realized_drift),
                predicted_drift: rec.and_then(|r| r.predicted_drift),
                closed_form: closed_form(&traj.schema, traj.d0, n),
            }
        })
        .collect()
}

fn out_path(config: &ExperimentConfig, stem: &str, format: Format) -> PathBuf {
    let ext = match format {
        Format::Csv => "csv",
        Format::Json => "json",
    };
    config.output.dir.join(format!("{stem}.{ext}"))
}

/// Run the exact dynamics and write the trajectory and a theory report.
pub fn cmd_dynamics(config: &ExperimentConfig) -> Result<Outcome> {
    config.validate()?;
    let problem = config.build_problem()?;
    let start = config.initial_distribution(&problem)?;
    let traj = dynamics::run(&start, &config.selection, &problem, config.engine.max_iters)?;
    let report = BoundReport::new(traj.d0, &config.selection, traj.tau)?;
    let meta = Metadata::new(config.hash(), None, None);
    let format = config.output.format;

    let rows = trajectory_rows(&traj);
    let mut files = Vec::new();
    let path = out_path(config, "trajectory", format);
    files.push(match format {
        Format::Csv => {
            let fields: Vec<_> = rows.iter().map(TrajectoryRow::fields).collect();
            output::write_csv(&path, &meta, &TRAJECTORY_HEADER, &fields)?
        }
        Format::Json => output::write_json(&path, &meta, &rows)?,
    });
    files.push(output::write_json(&config.output.dir.join("bound_report.json"), &meta, &report)?);
    if format == Format::Csv {
        files.push(output::write_csv(
            &config.output.dir.join("bound_report.csv"),
            &meta,
            &REPORT_HEADER,
            &[output::report_fields(&report)],
        )?);
    }

    let mut summary = format!(
        "{}: d0 = {}, engine tau = {}",
        config.selection,
        traj.d0,
        traj.tau.map_or("not reached".to_string(), |t| t.to_string())
    );
    if let (Some(b), Some(t)) = (report.thm_upper_bound, report.exact_tau_real) {
        summary.push_str(&format!(", upper bound = {b}, exact tau = {t} ({} iterations)", report.exact_tau_iterations.unwrap_or(0)));
    }
    if let Some(note) = &report.note {
        summary.push_str(&format!(" [{note}]"));
    }
    let not_converged = traj
        .tau
        .is_none()
        .then(|| format!("d = {} after {} iterations", traj.d_values().last().unwrap(), traj.max_iters));
    Ok(Outcome { files, summary, not_converged })
}

/// Evaluate the bounds and exact stopping times over the `[bounds]` grid.
pub fn cmd_bounds(config: &ExperimentConfig) -> Result<Outcome> {
    let grid = config.bounds.as_ref().ok_or_else(|| ExperimentError::Config {
        path: "config".into(),
        message: "the bounds command needs a [bounds] section with d0 and mu lists".into(),
    })?;
    let rows = theory::bounds_grid(&grid.d0, &grid.mu).map_err(|e| ExperimentError::Config {
        path: "section `bounds`".into(),
        message: e.to_string(),
    })?;
    let meta = Metadata::new(config.hash(), None, None);
    let path = out_path(config, "bounds", config.output.format);
    let file = match config.output.format {
        Format::Csv => {
            let fields: Vec<_> = rows.iter().map(output::grid_fields).collect();
            output::write_csv(&path, &meta, &GRID_HEADER, &fields)?
        }
        Format::Json => output::write_json(&path, &meta, &rows)?,
    };
    let dominated = rows.iter().filter(|r| r.thm1_dominates_thm3 && r.thm2_dominates_thm4).count();
    Ok(Outcome {
        files: vec![file],
        summary: format!("{} grid points, bounds dominate exact tau on {dominated}", rows.len()),
        not_converged: None,
    })
}

/// Aggregate written to `summary.json` by the simulate command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationReport {
    pub schema: SelectionSchema,
    pub population_size: usize,
    pub parent_count: usize,
    pub replications: usize,
    pub max_iters: usize,
    pub base_seed: u64,
    pub rng: String,
    pub stopping_times: Vec<Option<usize>>,
    pub converged: usize,
    pub not_reached: usize,
    pub mean_stopping_time: Option<f64>,
    pub median_stopping_time: Option<f64>,
    pub stddev_stopping_time: Option<f64>,
    pub quantile_05: Option<usize>,
    pub quantile_25: Option<usize>,
    pub quantile_75: Option<usize>,
    pub quantile_95: Option<usize>,
    pub engine_tau: Option<usize>,
    pub theory: BoundReport,
}

impl SimulationReport {
    fn new(summary: &MonteCarloSummary, theory: BoundReport) -> Self {
        Self {
            schema: summary.schema,
            population_size: summary.population_size,
            parent_count: summary.parent_count,
            replications: summary.trials.len(),
            max_iters: summary.max_iters,
            base_seed: summary.base_seed,
            rng: summary.rng.clone(),
            stopping_times: summary.trials.iter().map(|t| t.stopping_time).collect(),
            converged: summary.converged,
            not_reached: summary.not_reached,
            mean_stopping_time: summary.mean_stopping_time,
            median_stopping_time: summary.median_stopping_time,
            stddev_stopping_time: summary.stddev_stopping_time,
            quantile_05: summary.stopping_time_quantile(0.05),
            quantile_25: summary.stopping_time_quantile(0.25),
            quantile_75: summary.stopping_time_quantile(0.75),
            quantile_95: summary.stopping_time_quantile(0.95),
            engine_tau: summary.reference_tau,
            theory,
        }
    }
}

pub fn trial_rows(summary: &MonteCarloSummary) -> Vec<TrialRow> {
    summary
        .trials
        .iter()
        .flat_map(|t| {
            t.d_hat_trajectory
                .iter()
                .zip(&t.expected_fitness_trajectory)
                .enumerate()
                .map(move |(n, (&d_hat, &mean_fitness))| TrialRow { replication: t.replication, n, d_hat, mean_fitness })
        })
        .collect()
}

pub fn comparison_rows(summary: &MonteCarloSummary) -> Vec<ComparisonRow> {
    (0..summary.mean_d_hat.len())
        .map(|n| ComparisonRow {
            n,
            engine_d: summary
                .reference_d
                .get(n)
                .copied()
                .or(summary.reference_tau.map(|_| 0.0)),
            mean_d_hat: summary.mean_d_hat[n],
            mean_abs_error: summary.mean_abs_error[n],
        })
        .collect()
}

/// Run the finite-population simulator and compare it with the exact
/// dynamics from the uniform start.
pub fn cmd_simulate(config: &ExperimentConfig) -> Result<Outcome> {
    config.validate()?;
    let sim = config.sim_config()?.ok_or_else(|| ExperimentError::Config {
        path: "config".into(),
        message: "the simulate command needs a [simulation] section".into(),
    })?;
    let problem = config.build_problem()?;
    let summary = simulator::monte_carlo(&problem, &sim)?;
    let d0 = summary.reference_d[0];
    let theory = BoundReport::new(d0, &sim.schema, summary.reference_tau)?;
    let report = SimulationReport::new(&summary, theory);
    let meta = Metadata::new(config.hash(), Some(sim.seed), Some(RNG_DESCRIPTION.to_string()));
    let format = config.output.format;

    let trials = trial_rows(&summary);
    let comparison = comparison_rows(&summary);
    let mut files = Vec::new();
    match format {
        Format::Csv => {
            let t: Vec<_> = trials.iter().map(TrialRow::fields).collect();
            files.push(output::write_csv(&out_path(config, "trials", format), &meta, &TRIAL_HEADER, &t)?);
            let c: Vec<_> = comparison.iter().map(ComparisonRow::fields).collect();
            files.push(output::write_csv(&out_path(config, "comparison", format), &meta, &COMPARISON_HEADER, &c)?);
        }
        Format::Json => {
            files.push(output::write_json(&out_path(config, "trials", format), &meta, &trials)?);
            files.push(output::write_json(&out_path(config, "comparison", format), &meta, &comparison)?);
        }
    }
    files.push(output::write_json(&config.output.dir.join("summary.json"), &meta, &report)?);

    let text = format!(
        "{} N={} Se={} x{}: median stopping time {}, mean {}, engine tau {}",
        sim.schema,
        sim.population_size,
        report.parent_count,
        report.replications,
        fmt_summary(report.median_stopping_time),
        fmt_summary(report.mean_stopping_time),
        report.engine_tau.map_or("not reached".into(), |t| t.to_string()),
    );
    let not_converged =
        (summary.not_reached > 0).then(|| format!("{} of {} trials hit max_iters = {}", summary.not_reached, summary.trials.len(), summary.max_iters));
    Ok(Outcome { files, summary: text, not_converged })
}

fn fmt_summary(x: Option<f64>) -> String {
    x.map_or("n/a".into(), |v| format!("{v:.3}"))
}

/// Row of `compare.csv`: every schema's exact trajectory next to its closed
/// form, plus the simulator's mean when a `[simulation]` section is present.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CompareRow {
    pub n: usize,
    pub truncation_d: Option<f64>,
    pub lemma4_closed_form: Option<f64>,
    pub tournament_paper_d: Option<f64>,
    pub lemma5_closed_form: Option<f64>,
    pub tournament_fair_d: Option<f64>,
    pub tie_fair_closed_form: Option<f64>,
    pub simulated_mean_d_hat: Option<f64>,
}

pub const COMPARE_HEADER: [&str; 8] = [
    "n",
    "truncation_d",
    "lemma4_closed_form",
    "tournament_paper_d",
    "lemma5_closed_form",
    "tournament_fair_d",
    "tie_fair_closed_form",
    "simulated_mean_d_hat",
];

impl CompareRow {
    pub fn fields(&self) -> Vec<String> {
        vec![
            self.n.to_string(),
            fmt_opt(self.truncation_d),
            fmt_opt(self.lemma4_closed_form),
            fmt_opt(self.tournament_paper_d),
            fmt_opt(self.lemma5_closed_form),
            fmt_opt(self.tournament_fair_d),
            fmt_opt(self.tie_fair_closed_form),
            fmt_opt(self.simulated_mean_d_hat),
        ]
    }
}

/// Side-by-side exact dynamics of all three schemas from the configured
/// start. Truncation uses the configured `mu`, or 0.5 when the configured
/// schema is a tournament.
pub fn cmd_compare(config: &ExperimentConfig) -> Result<Outcome> {
    config.validate()?;
    let problem = config.build_problem()?;
    let start = config.initial_distribution(&problem)?;
    let mu = config.selection.mu().unwrap_or(0.5);
    let schemas = [
        SelectionSchema::Truncation { mu },
        SelectionSchema::TournamentPaperLiteral,
        SelectionSchema::TournamentTieFair,
    ];
    let trajs = schemas
        .iter()
        .map(|s| dynamics::run(&start, s, &problem, config.engine.max_iters))
        .collect::<crate::Result<Vec<_>>>()?;
    let simulated = match config.sim_config()? {
        Some(sim) => Some(simulator::monte_carlo(&problem, &sim)?),
        None => None,
    };

    let d_at = |t: &Trajectory, n: usize| {
        let d = t.d_values();
        d.get(n).copied().or(t.tau.map(|_| 0.0))
    };
    let horizon = trajs
        .iter()
        .map(|t| t.records.len() + 1)
        .chain(simulated.iter().map(|s| s.mean_d_hat.len()))
        .max()
        .unwrap_or(1);
    let d0 = trajs[0].d0;
    let rows: Vec<CompareRow> = (0..horizon)
        .map(|n| CompareRow {
            n,
            truncation_d: d_at(&trajs[0], n),
            lemma4_closed_form: closed_form(&schemas[0], d0, n),
            tournament_paper_d: d_at(&trajs[1], n),
            lemma5_closed_form: closed_form(&schemas[1], d0, n),
            tournament_fair_d: d_at(&trajs[2], n),
            tie_fair_closed_form: closed_form(&schemas[2], d0, n),
            simulated_mean_d_hat: simulated.as_ref().map(|s| s.mean_d_hat.get(n).copied().unwrap_or(0.0)),
        })
        .collect();

    let seed = config.simulation.as_ref().map(|s| s.seed);
    let meta = Metadata::new(config.hash(), seed, seed.map(|_| RNG_DESCRIPTION.to_string()));
    let path = out_path(config, "compare", config.output.format);
    let file = match config.output.format {
        Format::Csv => {
            let f: Vec<_> = rows.iter().map(CompareRow::fields).collect();
            output::write_csv(&path, &meta, &COMPARE_HEADER, &f)?
        }
        Format::Json => output::write_json(&path, &meta, &rows)?,
    };
    let taus: Vec<String> = schemas
        .iter()
        .zip(&trajs)
        .map(|(s, t)| format!("{s}: tau = {}", t.tau.map_or("not reached".into(), |v| v.to_string())))
        .collect();
    let not_converged = trajs
        .iter()
        .any(|t| t.tau.is_none())
        .then(|| "some schema did not reach d = 0 within engine.max_iters".to_string());
    Ok(Outcome { files: vec![file], summary: taus.join("; "), not_converged })
}
