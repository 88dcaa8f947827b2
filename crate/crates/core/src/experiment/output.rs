//! File formats written by the experiment commands.
//!
//! CSV files start with `# key=value` metadata lines, then a header row.
//! Floats are written with 17 significant digits so they read back bit for
//! bit; missing values are empty fields. JSON files wrap their payload as
//! `{"metadata": {...}, "data": ...}`.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use super::{ExperimentError, Result};

pub const TOOL: &str = "eda-lab";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Metadata {
    pub tool: String,
    pub version: String,
    pub config_sha256: String,
    pub base_seed: Option<u64>,
    pub rng: Option<String>,
}

impl Metadata {
    pub fn new(config_sha256: String, base_seed: Option<u64>, rng: Option<String>) -> Self {
        Self {
            tool: TOOL.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            config_sha256,
            base_seed,
            rng,
        }
    }

    fn csv_lines(&self) -> String {
        let mut s = format!("# tool={}\n# version={}\n# config_sha256={}\n", self.tool, self.version, self.config_sha256);
        if let Some(seed) = self.base_seed {
            s.push_str(&format!("# base_seed={seed}\n"));
        }
        if let Some(rng) = &self.rng {
            s.push_str(&format!("# rng={rng}\n"));
        }
        s
    }

    /// Recover metadata from the comment lines of a CSV file.
    pub fn from_csv(text: &str) -> Option<Self> {
        let mut m = Self::new(String::new(), None, None);
        let mut saw_tool = false;
        for line in text.lines().take_while(|l| l.starts_with('#')) {
            let (key, value) = line.trim_start_matches('#').trim().split_once('=')?;
            match key {
                "tool" => {
                    m.tool = value.to_string();
                    saw_tool = true;
                }
                "version" => m.version = value.to_string(),
                "config_sha256" => m.config_sha256 = value.to_string(),
                "base_seed" => m.base_seed = value.parse().ok(),
                "rng" => m.rng = Some(value.to_string()),
                _ => {}
            }
        }
        saw_tool.then_some(m)
    }
}

/// `{:.16e}`: 17 significant digits, lossless for f64.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

pub fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

pub fn fmt_opt_int<T: ToString>(x: Option<T>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> ExperimentError + '_ {
    move |source| ExperimentError::Io { path: path.to_owned(), source }
}

/// Write a CSV file from pre-formatted string fields.
pub fn write_csv(path: &Path, meta: &Metadata, header: &[&str], rows: &[Vec<String>]) -> Result<PathBuf> {
    let mut buf = meta.csv_lines().into_bytes();
    {
        let mut w = csv::Writer::from_writer(&mut buf);
        let to_out = |e: csv::Error| ExperimentError::Output(e.to_string());
        w.write_record(header).map_err(to_out)?;
        for row in rows {
            w.write_record(row).map_err(to_out)?;
        }
        w.flush().map_err(io_err(path))?;
    }
    write_file(path, &buf)
}

#[derive(Serialize, Deserialize)]
struct Wrapped<T> {
    metadata: Metadata,
    data: T,
}

pub fn write_json<T: Serialize>(path: &Path, meta: &Metadata, data: &T) -> Result<PathBuf> {
    let wrapped = Wrapped { metadata: meta.clone(), data };
    let mut text = serde_json::to_string_pretty(&wrapped).map_err(|e| ExperimentError::Output(e.to_string()))?;
    text.push('\n');
    write_file(path, text.as_bytes())
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<PathBuf> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(io_err(parent))?;
    }
    let mut f = fs::File::create(path).map_err(io_err(path))?;
    f.write_all(bytes).map_err(io_err(path))?;
    Ok(path.to_owned())
}

/// Read a CSV file written by [`write_csv`] into typed rows.
pub fn read_csv<T: DeserializeOwned>(path: &Path) -> Result<(Metadata, Vec<T>)> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    let meta = Metadata::from_csv(&text)
        .ok_or_else(|| ExperimentError::Output(format!("{} has no metadata header", path.display())))?;
    let mut reader = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
    let rows = reader
        .deserialize()
        .collect::<std::result::Result<Vec<T>, _>>()
        .map_err(|e| ExperimentError::Output(format!("{}: {e}", path.display())))?;
    Ok((meta, rows))
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<(Metadata, T)> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    let w: Wrapped<T> =
        serde_json::from_str(&text).map_err(|e| ExperimentError::Output(format!("{}: {e}", path.display())))?;
    Ok((w.metadata, w.data))
}

/// One row of `trajectory.csv`: the state at iteration `n` and the drift of
/// the step leaving it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRow {
    pub n: usize,
    pub d: f64,
    pub realized_drift: Option<f64>,
    pub predicted_drift: Option<f64>,
    pub closed_form: Option<f64>,
}

pub const TRAJECTORY_HEADER: [&str; 5] = ["n", "d", "realized_drift", "predicted_drift", "closed_form"];

impl TrajectoryRow {
    pub fn fields(&self) -> Vec<String> {
        vec![
            self.n.to_string(),
            fmt_f64(self.d),
            fmt_opt(self.realized_drift),
            fmt_opt(self.predicted_drift),
            fmt_opt(self.closed_form),
        ]
    }
}

/// One row of `trials.csv`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialRow {
    pub replication: usize,
    pub n: usize,
    pub d_hat: f64,
    pub mean_fitness: f64,
}

pub const TRIAL_HEADER: [&str; 4] = ["replication", "n", "d_hat", "mean_fitness"];

impl TrialRow {
    pub fn fields(&self) -> Vec<String> {
        vec![self.replication.to_string(), self.n.to_string(), fmt_f64(self.d_hat), fmt_f64(self.mean_fitness)]
    }
}

/// One row of `comparison.csv`: exact dynamics against the simulator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub n: usize,
    pub engine_d: Option<f64>,
    pub mean_d_hat: f64,
    pub mean_abs_error: f64,
}

pub const COMPARISON_HEADER: [&str; 4] = ["n", "engine_d", "mean_d_hat", "mean_abs_error"];

impl ComparisonRow {
    pub fn fields(&self) -> Vec<String> {
        vec![self.n.to_string(), fmt_opt(self.engine_d), fmt_f64(self.mean_d_hat), fmt_f64(self.mean_abs_error)]
    }
}

pub const GRID_HEADER: [&str; 10] = [
    "d0",
    "mu",
    "thm1_bound",
    "thm2_bound",
    "thm3_tau_real",
    "thm3_tau_iterations",
    "thm4_tau_real",
    "thm4_tau_iterations",
    "thm1_dominates_thm3",
    "thm2_dominates_thm4",
];

pub fn grid_fields(r: &crate::theory::GridRow) -> Vec<String> {
    vec![
        fmt_f64(r.d0),
        fmt_f64(r.mu),
        fmt_f64(r.thm1_bound),
        fmt_f64(r.thm2_bound),
        fmt_f64(r.thm3_tau_real),
        r.thm3_tau_iterations.to_string(),
        fmt_f64(r.thm4_tau_real),
        r.thm4_tau_iterations.to_string(),
        r.thm1_dominates_thm3.to_string(),
        r.thm2_dominates_thm4.to_string(),
    ]
}

pub const REPORT_HEADER: [&str; 11] = [
    "schema",
    "d0",
    "mu",
    "h0",
    "h1",
    "thm_upper_bound",
    "exact_tau_real",
    "exact_tau_iterations",
    "paper_convention_iterations",
    "engine_tau",
    "note",
];

/// Flat CSV form of a [`crate::theory::BoundReport`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub schema: String,
    pub d0: f64,
    pub mu: Option<f64>,
    pub h0: Option<f64>,
    pub h1: Option<f64>,
    pub thm_upper_bound: Option<f64>,
    pub exact_tau_real: Option<f64>,
    pub exact_tau_iterations: Option<u64>,
    pub paper_convention_iterations: Option<f64>,
    pub engine_tau: Option<usize>,
    pub note: Option<String>,
}

pub fn report_fields(r: &crate::theory::BoundReport) -> Vec<String> {
    vec![
        r.schema.to_string(),
        fmt_f64(r.d0),
        fmt_opt(r.mu),
        fmt_opt(r.h0),
        fmt_opt(r.h1),
        fmt_opt(r.thm_upper_bound),
        fmt_opt(r.exact_tau_real),
        fmt_opt_int(r.exact_tau_iterations),
        fmt_opt(r.paper_convention_iterations),
        fmt_opt_int(r.engine_tau),
        r.note.clone().unwrap_or_default(),
    ]
}
