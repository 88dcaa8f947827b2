//! Closed-form stopping-time bounds and exact stopping times.
//!
//! Everything here is a pure formula in `d0 = d(0)` and `mu`; none of it calls
//! into the dynamics engine, so the two can be checked against each other.

use serde::{Deserialize, Serialize};

use crate::error::{EdaError, Result};
use crate::selection::{check_mu, SelectionSchema};

/// Real stopping times this close to an integer are treated as that integer
/// before taking the ceiling; `log(1 - d0) / log(mu)` is only accurate to a
/// few ulps.
pub const INTEGER_SNAP: f64 = 1e-9;

fn check_d0(d0: f64) -> Result<()> {
    if (0.0..1.0).contains(&d0) {
        Ok(())
    } else {
        Err(EdaError::Domain(format!(
            "initial suboptimal mass d0 must lie in [0, 1) (some optimal mass is required), got {d0}"
        )))
    }
}

/// Expected hitting time bound `h0 * h1` for a process bounded by `h0`
/// whose drift is at least `1 / h1`.
pub fn lemma3_bound(h0: f64, h1: f64) -> Result<f64> {
    if !(h0 > 0.0 && h1 > 0.0) || !h0.is_finite() || !h1.is_finite() {
        return Err(EdaError::Domain(format!("h0 and h1 must be positive, got {h0}, {h1}")));
    }
    Ok(h0 * h1)
}

/// `(h0, h1)` for truncation: `h0 = d0`, `h1 = mu / ((1 - mu)(1 - d0))`.
pub fn truncation_drift_params(d0: f64, mu: f64) -> Result<(f64, f64)> {
    check_d0(d0)?;
    check_mu(mu)?;
    Ok((d0, mu / ((1.0 - mu) * (1.0 - d0))))
}

/// `(h0, h1)` for the doubling tournament: `h0 = d0`, `h1 = 1 / (1 - d0)`.
pub fn tournament_drift_params(d0: f64) -> Result<(f64, f64)> {
    check_d0(d0)?;
    Ok((d0, 1.0 / (1.0 - d0)))
}

/// Upper bound on the iterations to convergence under truncation:
/// `mu d0 / ((1 - mu)(1 - d0)) + 1`, evaluated as `h0 h1 + 1` with the
/// truncation drift parameters.
pub fn thm1_truncation_bound(d0: f64, mu: f64) -> Result<f64> {
    let (h0, h1) = truncation_drift_params(d0, mu)?;
    hitting_bound_plus_one(h0, h1)
}

/// Upper bound under two-tournament: `d0 / (1 - d0) + 1`, evaluated as
/// `h0 h1 + 1`.
pub fn thm2_tournament_bound(d0: f64) -> Result<f64> {
    let (h0, h1) = tournament_drift_params(d0)?;
    hitting_bound_plus_one(h0, h1)
}

/// `h0 h1 + 1`; at `d0 = 0` the process starts absorbed and `h0 = 0`.
fn hitting_bound_plus_one(h0: f64, h1: f64) -> Result<f64> {
    if h0 == 0.0 {
        return Ok(1.0);
    }
    Ok(lemma3_bound(h0, h1)? + 1.0)
}

/// `d(n) = max(0, 1 - (1 - d0) mu^-n)` under truncation.
pub fn lemma4_closed_form(d0: f64, mu: f64, n: usize) -> Result<f64> {
    check_d0(d0)?;
    check_mu(mu)?;
    Ok((1.0 - (1.0 - d0) * mu.powf(-(n as f64))).max(0.0))
}

/// `d(n) = max(0, 1 - (1 - d0) 2^n)` under the doubling tournament.
pub fn lemma5_closed_form(d0: f64, n: usize) -> Result<f64> {
    check_d0(d0)?;
    Ok((1.0 - (1.0 - d0) * 2f64.powf(n as f64)).max(0.0))
}

/// An exact stopping time: the real root of `d(tau) = 0` and the first
/// iteration at which `d` is actually 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExactTau {
    pub real: f64,
    pub iterations: u64,
}

impl ExactTau {
    fn from_real(real: f64) -> Self {
        let real = if real == 0.0 { 0.0 } else { real };
        let nearest = real.round();
        let iterations = if (real - nearest).abs() <= INTEGER_SNAP { nearest } else { real.ceil() };
        Self { real, iterations: iterations as u64 }
    }

    /// The iteration count quoted alongside the bounds: the real root plus
    /// the final check.
    pub fn paper_convention(&self) -> f64 {
        self.real + 1.0
    }
}

/// `tau = log(1 - d0) / log(mu)` under truncation.
pub fn thm3_exact_tau(d0: f64, mu: f64) -> Result<ExactTau> {
    check_d0(d0)?;
    check_mu(mu)?;
    Ok(ExactTau::from_real((1.0 - d0).ln() / mu.ln()))
}

/// `tau = log(1 - d0) / log(0.5)` under the doubling tournament.
pub fn thm4_exact_tau(d0: f64) -> Result<ExactTau> {
    check_d0(d0)?;
    Ok(ExactTau::from_real((1.0 - d0).ln() / 0.5f64.ln()))
}

/// The tie-fair tournament squares `d` each step: `d(n) = d0^(2^n)`.
/// It never reaches 0 in exact arithmetic for `d0 > 0`.
pub fn tie_fair_closed_form(d0: f64, n: usize) -> f64 {
    d0.powf(2f64.powf(n as f64))
}

/// Theory summary for one starting point and schema, optionally next to the
/// engine's observed stopping time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub schema: SelectionSchema,
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

impl BoundReport {
    pub fn new(d0: f64, schema: &SelectionSchema, engine_tau: Option<usize>) -> Result<Self> {
        check_d0(d0)?;
        let mut report = Self {
            schema: *schema,
            d0,
            mu: schema.mu(),
            h0: None,
            h1: None,
            thm_upper_bound: None,
            exact_tau_real: None,
            exact_tau_iterations: None,
            paper_convention_iterations: None,
            engine_tau,
            note: None,
        };
        let (bound, exact, params) = match *schema {
            SelectionSchema::Truncation { mu } => (
                thm1_truncation_bound(d0, mu)?,
                thm3_exact_tau(d0, mu)?,
                truncation_drift_params(d0, mu)?,
            ),
            SelectionSchema::TournamentPaperLiteral => (
                thm2_tournament_bound(d0)?,
                thm4_exact_tau(d0)?,
                tournament_drift_params(d0)?,
            ),
            SelectionSchema::TournamentTieFair => {
                report.note = Some(
                    "no closed-form bound; exact tau unbounded (d(n) = d0^(2^n) never reaches 0 for d0 > 0)"
                        .into(),
                );
                return Ok(report);
            }
        };
        report.h0 = Some(params.0);
        report.h1 = Some(params.1);
        report.thm_upper_bound = Some(bound);
        report.exact_tau_real = Some(exact.real);
        report.exact_tau_iterations = Some(exact.iterations);
        report.paper_convention_iterations = Some(exact.paper_convention());
        Ok(report)
    }

    /// Bound is at least the exact real stopping time (vacuous when either
    /// is undefined).
    pub fn bound_dominates(&self) -> bool {
        match (self.thm_upper_bound, self.exact_tau_real) {
            (Some(b), Some(t)) => b >= t,
            _ => true,
        }
    }
}

/// One row of a `(d0, mu)` grid: both upper bounds and both exact stopping
/// times.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridRow {
    pub d0: f64,
    pub mu: f64,
    pub thm1_bound: f64,
    pub thm2_bound: f64,
    pub thm3_tau_real: f64,
    pub thm3_tau_iterations: u64,
    pub thm4_tau_real: f64,
    pub thm4_tau_iterations: u64,
    pub thm1_dominates_thm3: bool,
    pub thm2_dominates_thm4: bool,
}

/// Evaluate every `(d0, mu)` pair, `d0` outermost. The first out-of-domain
/// value aborts the whole grid.
pub fn bounds_grid(d0s: &[f64], mus: &[f64]) -> Result<Vec<GridRow>> {
    for &d0 in d0s {
        check_d0(d0).map_err(|_| EdaError::Domain(format!("grid value d0 = {d0} is outside [0, 1)")))?;
    }
    for &mu in mus {
        check_mu(mu).map_err(|_| EdaError::Domain(format!("grid value mu = {mu} is outside (0, 1)")))?;
    }
    let mut rows = Vec::with_capacity(d0s.len() * mus.len());
    for &d0 in d0s {
        let thm2 = thm2_tournament_bound(d0)?;
        let thm4 = thm4_exact_tau(d0)?;
        for &mu in mus {
            let thm1 = thm1_truncation_bound(d0, mu)?;
            let thm3 = thm3_exact_tau(d0, mu)?;
            rows.push(GridRow {
                d0,
                mu,
                thm1_bound: thm1,
                thm2_bound: thm2,
                thm3_tau_real: thm3.real,
                thm3_tau_iterations: thm3.iterations,
                thm4_tau_real: thm4.real,
                thm4_tau_iterations: thm4.iterations,
                thm1_dominates_thm3: thm1 >= thm3.real,
                thm2_dominates_thm4: thm2 >= thm4.real,
            });
        }
    }
    Ok(rows)
}
