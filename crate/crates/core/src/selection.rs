//! Exact infinite-population selection operators on level distributions.
//!
//! * truncation with threshold `mu`: the best `mu` fraction of the mass is kept
//!   and rescaled by `1/mu`; a level straddling the threshold is included
//!   fractionally so the selected mass is exactly `mu`;
//! * two-tournament, doubling (`ties = paper`): the optimal mass doubles
//!   (capped at 1) and the rest is spread over the suboptimal levels in
//!   proportion to `2 * mass(l) * F<=(l)`;
//! * two-tournament, tie-fair: the exact law of the better of two i.i.d. draws,
//!   `F<=(l)^2 - F<(l)^2`.

use std::fmt;

use num_traits::Num;
use serde::{Deserialize, Serialize};

use crate::error::{EdaError, Result};
use crate::fitness::{d_of, LevelDistribution, Problem};

/// Relative slack under which a mass is considered to have reached a
/// saturation threshold (`mu` for truncation, 1 for the doubled optimum).
///
/// Without it, a state that should saturate in exact arithmetic can stop one
/// ulp short and leave `d` at ~1e-16 for one extra iteration.
pub const SATURATION_TOL: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SchemaSpec", into = "SchemaSpec")]
pub enum SelectionSchema {
    /// Keep the best `mu` fraction, `0 < mu < 1`.
    Truncation { mu: f64 },
    TournamentPaperLiteral,
    TournamentTieFair,
}

impl SelectionSchema {
    pub fn truncation(mu: f64) -> Result<Self> {
        check_mu(mu)?;
        Ok(Self::Truncation { mu })
    }

    /// Apply the schema's selection operator once.
    pub fn select(&self, dist: &LevelDistribution, problem: &Problem) -> Result<LevelDistribution> {
        match *self {
            Self::Truncation { mu } => truncation_select(dist, mu),
            Self::TournamentPaperLiteral => tournament_select_paper(dist, problem),
            Self::TournamentTieFair => tournament_select_fair(dist),
        }
    }

    pub fn mu(&self) -> Option<f64> {
        match *self {
            Self::Truncation { mu } => Some(mu),
            _ => None,
        }
    }
}

impl fmt::Display for SelectionSchema {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Truncation { mu } => write!(f, "truncation(mu={mu})"),
            Self::TournamentPaperLiteral => f.write_str("tournament(ties=paper)"),
            Self::TournamentTieFair => f.write_str("tournament(ties=fair)"),
        }
    }
}

/// Tie handling of the two-tournament operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Ties {
    Paper,
    Fair,
}

/// Config-file form: `{"selection":"truncation","mu":0.5}` or
/// `{"selection":"tournament","ties":"paper"|"fair"}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "selection", rename_all = "lowercase", deny_unknown_fields)]
pub enum SchemaSpec {
    Truncation { mu: f64 },
    Tournament { ties: Ties },
}

impl TryFrom<SchemaSpec> for SelectionSchema {
    type Error = EdaError;

    fn try_from(spec: SchemaSpec) -> Result<Self> {
        match spec {
            SchemaSpec::Truncation { mu } => Self::truncation(mu),
            SchemaSpec::Tournament { ties: Ties::Paper } => Ok(Self::TournamentPaperLiteral),
            SchemaSpec::Tournament { ties: Ties::Fair } => Ok(Self::TournamentTieFair),
        }
    }
}

impl From<SelectionSchema> for SchemaSpec {
    fn from(schema: SelectionSchema) -> Self {
        match schema {
            SelectionSchema::Truncation { mu } => SchemaSpec::Truncation { mu },
            SelectionSchema::TournamentPaperLiteral => SchemaSpec::Tournament { ties: Ties::Paper },
            SelectionSchema::TournamentTieFair => SchemaSpec::Tournament { ties: Ties::Fair },
        }
    }
}

pub(crate) fn check_mu(mu: f64) -> Result<()> {
    if mu > 0.0 && mu < 1.0 {
        Ok(())
    } else {
        Err(EdaError::Domain(format!("truncation threshold mu must lie in (0, 1), got {mu}")))
    }
}

/// Where truncation cuts a distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationCut {
    /// The threshold fitness.
    pub beta: f64,
    /// Index of `beta` in the distribution's levels.
    pub beta_index: usize,
    /// Fraction of the mass at `beta` that is selected, in (0, 1].
    pub boundary_fraction: f64,
}

impl TruncationCut {
    /// Mass selected by the cut.
    pub fn selected_mass(&self, dist: &LevelDistribution) -> f64 {
        let m = dist.masses();
        m[self.beta_index + 1..].iter().sum::<f64>() + self.boundary_fraction * m[self.beta_index]
    }
}

/// Scan levels from the top until the cumulative mass reaches `mu`.
pub fn truncation_cut(dist: &LevelDistribution, mu: f64) -> Result<TruncationCut> {
    check_mu(mu)?;
    let masses = dist.masses();
    let mut above = 0.0;
    let mut lowest_positive = masses.len() - 1;
    for (i, &m) in masses.iter().enumerate().rev() {
        if m <= 0.0 {
            continue;
        }
        lowest_positive = i;
        if above + m >= mu * (1.0 - SATURATION_TOL) {
            let boundary_fraction = ((mu - above) / m).clamp(f64::MIN_POSITIVE, 1.0);
            return Ok(TruncationCut { beta: dist.levels()[i], beta_index: i, boundary_fraction });
        }
        above += m;
    }
    // only reachable through rounding when the total mass sits a hair under mu
    Ok(TruncationCut {
        beta: dist.levels()[lowest_positive],
        beta_index: lowest_positive,
        boundary_fraction: 1.0,
    })
}

pub fn truncation_select(dist: &LevelDistribution, mu: f64) -> Result<LevelDistribution> {
    let cut = truncation_cut(dist, mu)?;
    let mass = dist
        .masses()
        .iter()
        .enumerate()
        .map(|(i, &m)| match i.cmp(&cut.beta_index) {
            std::cmp::Ordering::Less => 0.0,
            std::cmp::Ordering::Equal => cut.boundary_fraction * m / mu,
            std::cmp::Ordering::Greater => m / mu,
        })
        .collect();
    LevelDistribution::renormalized(dist.levels().to_vec(), mass)
}

/// Doubling two-tournament: optimal mass `p -> min(1, 2p)`.
pub fn tournament_select_paper(
    dist: &LevelDistribution,
    problem: &Problem,
) -> Result<LevelDistribution> {
    let masses = dist.masses();
    let opt = dist.levels().iter().position(|&l| l == problem.f_max());
    let p = opt.map_or(0.0, |i| masses[i]);
    let p_new = if 2.0 * p >= 1.0 - SATURATION_TOL { 1.0 } else { 2.0 * p };

    let mut weights = Vec::with_capacity(masses.len());
    let mut at_or_below = 0.0;
    for (i, &m) in masses.iter().enumerate() {
        at_or_below += m;
        weights.push(if Some(i) == opt { 0.0 } else { 2.0 * m * at_or_below });
    }
    let total_weight: f64 = weights.iter().sum();
    let rest = 1.0 - p_new;
    let mass = weights
        .iter()
        .enumerate()
        .map(|(i, &w)| {
            if Some(i) == opt {
                p_new
            } else if total_weight > 0.0 {
                w / total_weight * rest
            } else {
                0.0
            }
        })
        .collect();
    LevelDistribution::renormalized(dist.levels().to_vec(), mass)
}

/// Law of the better of two independent draws, level by level:
/// `F<=(l)^2 - F<(l)^2`. Works over any exact or floating number type.
pub fn max_of_two_masses<T: Num + Copy>(masses: &[T]) -> Vec<T> {
    let mut below = T::zero();
    masses
        .iter()
        .map(|&m| {
            let at_or_below = below + m;
            let out = at_or_below * at_or_below - below * below;
            below = at_or_below;
            out
        })
        .collect()
}

/// Two-tournament as the exact max-of-two law; ties resolve within the level.
pub fn tournament_select_fair(dist: &LevelDistribution) -> Result<LevelDistribution> {
    LevelDistribution::renormalized(dist.levels().to_vec(), max_of_two_masses(dist.masses()))
}

/// Expected one-step decrease of `d` from the closed-form drift:
/// `(1/mu - 1)(1 - d)` for truncation and `1 - d` for the doubling
/// tournament. Both are the unsaturated values.
pub fn predicted_drift(
    dist: &LevelDistribution,
    schema: &SelectionSchema,
    problem: &Problem,
) -> Result<f64> {
    let d = d_of(dist, problem);
    predicted_drift_at(d, schema)
}

pub(crate) fn predicted_drift_at(d: f64, schema: &SelectionSchema) -> Result<f64> {
    match *schema {
        SelectionSchema::Truncation { mu } => Ok((1.0 / mu - 1.0) * (1.0 - d)),
        SelectionSchema::TournamentPaperLiteral => Ok(1.0 - d),
        SelectionSchema::TournamentTieFair => Err(EdaError::UnsupportedSchema(*schema)),
    }
}

/// One step of a trajectory: `d` before and after selection and its drift.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriftRecord {
    pub n: usize,
    pub d_before: f64,
    pub d_after: f64,
    /// Always `d_before - d_after`.
    pub realized_drift: f64,
    /// `None` when the schema has no closed-form drift.
    pub predicted_drift: Option<f64>,
}

impl DriftRecord {
    pub fn new(n: usize, d_before: f64, d_after: f64, predicted_drift: Option<f64>) -> Self {
        Self { n, d_before, d_after, realized_drift: d_before - d_after, predicted_drift }
    }

    /// The predicted drift would push `d` below 0, so the step was capped at
    /// the absorbing state and the drift identity does not apply.
    pub fn is_saturated(&self) -> bool {
        self.predicted_drift.is_some_and(|p| p > self.d_before)
    }
}
