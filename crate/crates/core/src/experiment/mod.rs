//! Config-driven experiments: load a TOML (or JSON) description, run the
//! engine, the closed forms and the simulator, and write plot-ready files.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::error::EdaError;
use crate::fitness::{LevelDistribution, Problem, ProblemSpec};
use crate::selection::SelectionSchema;
use crate::simulator::SimConfig;

mod commands;
pub mod output;

pub use commands::{cmd_bounds, cmd_compare, cmd_dynamics, cmd_simulate, Outcome};

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("config error in {path}: {message}")]
    Config { path: String, message: String },

    #[error("{0}")]
    Model(#[from] EdaError),

    #[error("did not converge: {0}")]
    NotConverged(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("output error: {0}")]
    Output(String),
}

impl ExperimentError {
    /// Process exit status: 2 for bad configs, 3 for non-convergence,
    /// 1 for anything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config { .. } => 2,
            Self::Model(EdaError::Config(_) | EdaError::Domain(_)) => 2,
            Self::NotConverged(_) => 3,
            _ => 1,
        }
    }

    fn config(path: impl fmt::Display, message: impl Into<String>) -> Self {
        Self::Config { path: path.to_string(), message: message.into() }
    }
}

pub type Result<T> = std::result::Result<T, ExperimentError>;

/// Starting distribution of the exact dynamics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum InitialSpec {
    /// Every point equally likely.
    #[default]
    Uniform,
    /// Uniform shape on the suboptimal levels with total mass `d0`.
    D0 { d0: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EngineSection {
    #[serde(default = "default_engine_iters")]
    pub max_iters: usize,
}

fn default_engine_iters() -> usize {
    1000
}

impl Default for EngineSection {
    fn default() -> Self {
        Self { max_iters: default_engine_iters() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationSection {
    pub population_size: usize,
    #[serde(default)]
    pub parent_count: Option<usize>,
    #[serde(default = "default_replications")]
    pub replications: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub max_iters: Option<usize>,
}

fn default_replications() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct BoundsSection {
    #[serde(default)]
    pub d0: Vec<f64>,
    #[serde(default)]
    pub mu: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            other => Err(format!("unknown format `{other}` (expected csv or json)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default = "default_out_dir")]
    pub dir: PathBuf,
    #[serde(default)]
    pub format: Format,
}

fn default_out_dir() -> PathBuf {
    PathBuf::from("eda-lab-out")
}

impl Default for OutputSection {
    fn default() -> Self {
        Self { dir: default_out_dir(), format: Format::Csv }
    }
}

/// One experiment, as read from a config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub problem: ProblemSpec,
    pub selection: SelectionSchema,
    #[serde(default)]
    pub initial: InitialSpec,
    #[serde(default)]
    pub engine: EngineSection,
    #[serde(default)]
    pub simulation: Option<SimulationSection>,
    #[serde(default)]
    pub bounds: Option<BoundsSection>,
    #[serde(default)]
    pub output: OutputSection,
}

impl ExperimentConfig {
    /// Read a config file; `.json` files are parsed as JSON, anything else as
    /// TOML. Parse errors carry the line and field of the problem.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| ExperimentError::Io { path: path.to_owned(), source })?;
        let is_json = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
        let config = if is_json {
            Self::from_json_str(&text).map_err(|e| relabel(e, path))?
        } else {
            Self::from_toml_str(&text).map_err(|e| relabel(e, path))?
        };
        config.validate().map_err(|e| relabel(e, path))?;
        Ok(config)
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| ExperimentError::config("<toml>", e.to_string()))
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| {
            ExperimentError::config("<json>", format!("{e} (line {}, column {})", e.line(), e.column()))
        })
    }

    /// Check every parameter against the domain of the module that uses it.
    pub fn validate(&self) -> Result<()> {
        let problem = self.build_problem()?;
        self.initial_distribution(&problem)?;
        if self.engine.max_iters == 0 {
            return Err(ExperimentError::config("field `engine.max_iters`", "must be at least 1"));
        }
        if let Some(sim) = self.sim_config()? {
            sim.resolved_parent_count()
                .map_err(|e| ExperimentError::config("section `simulation`", e.to_string()))?;
            if sim.replications == 0 {
                return Err(ExperimentError::config("field `simulation.replications`", "must be at least 1"));
            }
        }
        if let Some(b) = &self.bounds {
            crate::theory::bounds_grid(&b.d0, &b.mu)
                .map_err(|e| ExperimentError::config("section `bounds`", e.to_string()))?;
        }
        Ok(())
    }

    pub fn build_problem(&self) -> Result<Problem> {
        self.problem.build().map_err(|e| ExperimentError::config("section `problem`", e.to_string()))
    }

    pub fn initial_distribution(&self, problem: &Problem) -> Result<LevelDistribution> {
        match self.initial {
            InitialSpec::Uniform => Ok(LevelDistribution::uniform(problem)),
            InitialSpec::D0 { d0 } => LevelDistribution::with_suboptimal_mass(problem, d0)
                .map_err(|e| ExperimentError::config("field `initial.d0`", e.to_string())),
        }
    }

    pub fn sim_config(&self) -> Result<Option<SimConfig>> {
        Ok(self.simulation.as_ref().map(|s| SimConfig {
            population_size: s.population_size,
            parent_count: s.parent_count,
            schema: self.selection,
            max_iters: s.max_iters,
            seed: s.seed,
            replications: s.replications,
        }))
    }

    /// Apply the command-line overrides.
    pub fn with_overrides(mut self, out_dir: Option<PathBuf>, seed: Option<u64>, format: Option<Format>) -> Self {
        if let Some(dir) = out_dir {
            self.output.dir = dir;
        }
        if let (Some(seed), Some(sim)) = (seed, self.simulation.as_mut()) {
            sim.seed = seed;
        }
        if let Some(format) = format {
            self.output.format = format;
        }
        self
    }

    /// SHA-256 of the canonical JSON form of the effective config. The
    /// output directory is left out so relocated runs hash the same.
    pub fn hash(&self) -> String {
        let mut value = serde_json::to_value(self).expect("config serializes");
        if let Some(out) = value.get_mut("output").and_then(|o| o.as_object_mut()) {
            out.remove("dir");
        }
        let canonical = serde_json::to_vec(&value).expect("config serializes");
        hex::encode(Sha256::digest(&canonical))
    }
}

fn relabel(err: ExperimentError, path: &Path) -> ExperimentError {
    match err {
        ExperimentError::Config { path: what, message } => ExperimentError::Config {
            path: format!("{} ({what})", path.display()),
            message,
        },
        other => other,
    }
}
