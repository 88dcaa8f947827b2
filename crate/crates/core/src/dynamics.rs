//! Iteration of the infinite-population EDA: select, replace the population
//! with the parents, stop once no mass is left outside the optimum.

use serde::{Deserialize, Serialize};

use crate::error::{EdaError, Result};
use crate::fitness::{d_of, LevelDistribution, Problem};
use crate::selection::{predicted_drift_at, DriftRecord, SelectionSchema};

/// Runs longer than this keep no distribution snapshots unless asked to.
pub const SNAPSHOT_LIMIT: usize = 10_000;

/// Tolerance of the drift identity check.
pub const DRIFT_TOL: f64 = 1e-12;

/// One generation: selection followed by the identity update.
pub fn step(
    dist: &LevelDistribution,
    schema: &SelectionSchema,
    problem: &Problem,
) -> Result<LevelDistribution> {
    schema.select(dist, problem)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub schema: SelectionSchema,
    pub d0: f64,
    pub records: Vec<DriftRecord>,
    /// `snapshots[n]` is the distribution at iteration `n`.
    pub snapshots: Option<Vec<LevelDistribution>>,
    pub final_distribution: LevelDistribution,
    /// First `n` with `d(n) = 0`, `None` if not reached within `max_iters`.
    pub tau: Option<usize>,
    pub max_iters: usize,
}

impl Trajectory {
    /// `d(0), d(1), ...` up to the last computed iteration.
    pub fn d_values(&self) -> Vec<f64> {
        std::iter::once(self.d0).chain(self.records.iter().map(|r| r.d_after)).collect()
    }

    pub fn converged(&self) -> bool {
        self.tau.is_some()
    }

    /// Steps on which realized and predicted drift disagree.
    pub fn drift_violations(&self) -> Result<Vec<DriftRecord>> {
        verify_drift(&self.records, &self.schema)
    }
}

/// Iterate from `dist0` until `d = 0` or `max_iters` steps have been taken.
/// Snapshots are kept when `max_iters <= SNAPSHOT_LIMIT`.
pub fn run(
    dist0: &LevelDistribution,
    schema: &SelectionSchema,
    problem: &Problem,
    max_iters: usize,
) -> Result<Trajectory> {
    run_with_snapshots(dist0, schema, problem, max_iters, max_iters <= SNAPSHOT_LIMIT)
}

pub fn run_with_snapshots(
    dist0: &LevelDistribution,
    schema: &SelectionSchema,
    problem: &Problem,
    max_iters: usize,
    keep_snapshots: bool,
) -> Result<Trajectory> {
    if max_iters == 0 {
        return Err(EdaError::Config("max_iters must be at least 1".into()));
    }
    let d0 = d_of(dist0, problem);
    let mut snapshots = keep_snapshots.then(|| vec![dist0.clone()]);
    let mut records = Vec::new();
    let mut dist = dist0.clone();
    let mut d = d0;
    let mut tau = None;

    for n in 0..=max_iters {
        if d == 0.0 {
            tau = Some(n);
            break;
        }
        if n == max_iters {
            break;
        }
        let next = step(&dist, schema, problem)?;
        let d_next = d_of(&next, problem);
        records.push(DriftRecord::new(n, d, d_next, predicted_drift_at(d, schema).ok()));
        if let Some(s) = snapshots.as_mut() {
            s.push(next.clone());
        }
        dist = next;
        d = d_next;
    }

    Ok(Trajectory {
        schema: *schema,
        d0,
        records,
        snapshots,
        final_distribution: dist,
        tau,
        max_iters,
    })
}

/// Returns the records whose realized drift differs from the predicted one
/// by more than [`DRIFT_TOL`]. Saturated steps and steps starting at `d = 0`
/// are exempt.
pub fn verify_drift(records: &[DriftRecord], schema: &SelectionSchema) -> Result<Vec<DriftRecord>> {
    if let SelectionSchema::TournamentTieFair = schema {
        return Err(EdaError::UnsupportedSchema(*schema));
    }
    Ok(records
        .iter()
        .filter(|r| r.d_before > 0.0 && !r.is_saturated())
        .filter(|r| {
            let gap = (r.realized_drift - r.predicted_drift.unwrap_or(f64::NAN)).abs();
            gap.is_nan() || gap > DRIFT_TOL
        })
        .copied()
        .collect())
}
