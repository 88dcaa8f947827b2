//! Exact infinite-population dynamics of an Estimation of Distribution
//! Algorithm under truncation and two-tournament selection, closed-form
//! stopping-time bounds, and a finite-population simulator to check both.
//!
//! The runnable programs under `examples/` walk through each part:
//!
//! ```bash
//! cargo run -p eda-lab --example onemax_dynamics
//! cargo run -p eda-lab --example selection_operators
//! cargo run -p eda-lab --example stopping_time_bounds
//! cargo run -p eda-lab --release --example finite_population
//! cargo run -p eda-lab --release --example population_scaling
//! cargo run -p eda-lab --example experiment_files
//! ```

pub mod dynamics;
pub mod error;
pub mod experiment;
pub mod fitness;
pub mod selection;
pub mod simulator;
pub mod theory;

pub use dynamics::{run, step, verify_drift, Trajectory};
pub use error::{EdaError, Result};
pub use fitness::{d_of, LevelDistribution, Problem, ProblemSpec};
pub use selection::{DriftRecord, SelectionSchema, TruncationCut};
pub use simulator::{monte_carlo, run_trial, MonteCarloSummary, SimConfig, TrialResult};
pub use theory::BoundReport;
