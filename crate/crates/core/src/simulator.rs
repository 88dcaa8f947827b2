//! Finite-population EDA used as the empirical check of the exact dynamics.
//!
//! Each generation selects `Se` parents from the `N` individuals and draws the
//! next `N` individuals i.i.d. from the parents, so the population size stays
//! fixed and the next population has the parents' empirical distribution in
//! expectation.

use rand::seq::index;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics;
use crate::error::{EdaError, Result};
use crate::fitness::{LevelDistribution, Point, Problem};
use crate::selection::SelectionSchema;

/// Generator used for every trial; replication `k` is seeded with
/// `base_seed + k` (wrapping).
pub const RNG_DESCRIPTION: &str = "ChaCha8Rng (rand_chacha 0.3) seed_from_u64(base_seed + replication)";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub population_size: usize,
    /// `Se`. Ignored for truncation, where it is `round(mu * N)`.
    /// Defaults to `N / 2` for tournaments.
    pub parent_count: Option<usize>,
    pub schema: SelectionSchema,
    /// Defaults to `10 * tau + 100`, `tau` from the exact dynamics.
    pub max_iters: Option<usize>,
    pub seed: u64,
    pub replications: usize,
}

impl SimConfig {
    pub fn new(population_size: usize, schema: SelectionSchema, seed: u64, replications: usize) -> Self {
        Self { population_size, parent_count: None, schema, max_iters: None, seed, replications }
    }

    /// The number of parents per generation.
    ///
    /// Truncation derives it from `mu` and ignores `parent_count`. `Se < N`
    /// is enforced for `N >= 2`; a population of one keeps its only
    /// individual as the parent.
    pub fn resolved_parent_count(&self) -> Result<usize> {
        let n = self.population_size;
        if n == 0 {
            return Err(EdaError::Config("population_size must be at least 1".into()));
        }
        if self.parent_count == Some(0) {
            return Err(EdaError::Config("parent_count must be at least 1".into()));
        }
        let se = match self.schema {
            SelectionSchema::Truncation { mu } => ((mu * n as f64).round() as usize).max(1),
            _ => self.parent_count.unwrap_or(n / 2).max(1),
        };
        if n >= 2 && se >= n {
            return Err(EdaError::Config(format!(
                "parent_count must be smaller than population_size ({se} >= {n})"
            )));
        }
        if n == 1 && se > 1 {
            return Err(EdaError::Config("a population of one has one parent".into()));
        }
        Ok(se)
    }

    pub fn resolved_max_iters(&self, problem: &Problem) -> Result<usize> {
        match self.max_iters {
            Some(m) => Ok(m),
            None => default_max_iters(problem, &self.schema),
        }
    }

    fn validate(&self) -> Result<()> {
        self.resolved_parent_count()?;
        if self.replications == 0 {
            return Err(EdaError::Config("replications must be at least 1".into()));
        }
        Ok(())
    }
}

/// `10 * tau + 100`, with `tau` the exact-dynamics stopping time from the
/// uniform start.
pub fn default_max_iters(problem: &Problem, schema: &SelectionSchema) -> Result<usize> {
    let start = LevelDistribution::uniform(problem);
    let traj = dynamics::run_with_snapshots(&start, schema, problem, dynamics::SNAPSHOT_LIMIT, false)?;
    Ok(10 * traj.tau.unwrap_or(dynamics::SNAPSHOT_LIMIT) + 100)
}

/// Individuals with their cached fitness values.
#[derive(Debug, Clone, PartialEq)]
pub struct Population {
    pub points: Vec<Point>,
    pub fitness: Vec<f64>,
}

impl Population {
    pub fn from_points(problem: &Problem, points: Vec<Point>) -> Self {
        let fitness = points.iter().map(|&x| problem.fitness(x)).collect();
        Self { points, fitness }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn mean_fitness(&self) -> f64 {
        self.fitness.iter().sum::<f64>() / self.len() as f64
    }

    /// Fraction of individuals below `f_max`.
    pub fn d_hat(&self, f_max: f64) -> f64 {
        self.fitness.iter().filter(|&&f| f != f_max).count() as f64 / self.len() as f64
    }

    fn pick(&self, indices: impl IntoIterator<Item = usize>) -> Self {
        let (points, fitness) = indices.into_iter().map(|i| (self.points[i], self.fitness[i])).unzip();
        Self { points, fitness }
    }
}

/// `n` points drawn uniformly with replacement from the search space.
pub fn sample_initial<R: Rng + ?Sized>(problem: &Problem, n: usize, rng: &mut R) -> Population {
    let points = (0..n).map(|_| problem.sample_point(rng)).collect();
    Population::from_points(problem, points)
}

/// Pick `se` parents.
///
/// Truncation keeps the `se` fittest, breaking ties at the cut uniformly at
/// random. Both tournament variants run `se` two-tournaments with
/// replacement, ties decided by a fair coin.
pub fn select_parents<R: Rng + ?Sized>(
    population: &Population,
    schema: &SelectionSchema,
    se: usize,
    rng: &mut R,
) -> Population {
    assert!(!population.is_empty(), "cannot select from an empty population");
    match schema {
        SelectionSchema::Truncation { .. } => truncate(population, se.min(population.len()), rng),
        SelectionSchema::TournamentPaperLiteral | SelectionSchema::TournamentTieFair => {
            let n = population.len();
            let f = &population.fitness;
            let winners = (0..se).map(|_| {
                let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
                if f[a] > f[b] || (f[a] == f[b] && rng.gen::<bool>()) {
                    a
                } else {
                    b
                }
            });
            // collect first so the RNG draw order does not depend on `pick`
            let winners: Vec<usize> = winners.collect();
            population.pick(winners)
        }
    }
}

fn truncate<R: Rng + ?Sized>(population: &Population, se: usize, rng: &mut R) -> Population {
    if se == 0 {
        return population.pick(std::iter::empty());
    }
    let mut sorted = population.fitness.clone();
    let (_, beta, _) = sorted.select_nth_unstable_by(se - 1, |a, b| b.total_cmp(a));
    let beta = *beta;

    let mut chosen: Vec<usize> = Vec::with_capacity(se);
    let mut tied: Vec<usize> = Vec::new();
    for (i, &f) in population.fitness.iter().enumerate() {
        if f > beta {
            chosen.push(i);
        } else if f == beta {
            tied.push(i);
        }
    }
    let need = se - chosen.len();
    chosen.extend(index::sample(rng, tied.len(), need).into_iter().map(|k| tied[k]));
    population.pick(chosen)
}

/// `n` i.i.d. draws from the parent multiset.
pub fn resample<R: Rng + ?Sized>(parents: &Population, n: usize, rng: &mut R) -> Population {
    assert!(!parents.is_empty(), "cannot resample from no parents");
    let k = parents.len();
    let draws: Vec<usize> = (0..n).map(|_| rng.gen_range(0..k)).collect();
    parents.pick(draws)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialResult {
    pub replication: usize,
    /// First generation whose population is entirely optimal.
    pub stopping_time: Option<usize>,
    /// `d_hat(n)` for every generation that was evaluated.
    pub d_hat_trajectory: Vec<f64>,
    /// Mean population fitness per generation.
    pub expected_fitness_trajectory: Vec<f64>,
    /// Mean parent fitness per generation that ran selection.
    pub parent_mean_fitness: Vec<f64>,
    pub seed_used: u64,
}

impl TrialResult {
    /// First generation whose mean fitness equals `f_max`.
    pub fn first_optimal_mean(&self, f_max: f64) -> Option<usize> {
        self.expected_fitness_trajectory.iter().position(|&m| m == f_max)
    }

    pub fn first_zero_d_hat(&self) -> Option<usize> {
        self.d_hat_trajectory.iter().position(|&d| d == 0.0)
    }
}

/// One finite-population run; `replication` only selects the seed.
pub fn run_trial(problem: &Problem, config: &SimConfig, replication: usize) -> Result<TrialResult> {
    config.validate()?;
    let se = config.resolved_parent_count()?;
    let max_iters = config.resolved_max_iters(problem)?;
    let seed = config.seed.wrapping_add(replication as u64);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = config.population_size;
    let f_max = problem.f_max();

    let mut pop = sample_initial(problem, n, &mut rng);
    let mut result = TrialResult {
        replication,
        stopping_time: None,
        d_hat_trajectory: Vec::new(),
        expected_fitness_trajectory: Vec::new(),
        parent_mean_fitness: Vec::new(),
        seed_used: seed,
    };
    for gen in 0..=max_iters {
        let d_hat = pop.d_hat(f_max);
        result.d_hat_trajectory.push(d_hat);
        result.expected_fitness_trajectory.push(pop.mean_fitness());
        if d_hat == 0.0 {
            result.stopping_time = Some(gen);
            break;
        }
        if gen == max_iters {
            break;
        }
        let parents = select_parents(&pop, &config.schema, se, &mut rng);
        result.parent_mean_fitness.push(parents.mean_fitness());
        pop = resample(&parents, n, &mut rng);
    }
    Ok(result)
}

/// Stopping-time statistics and per-generation error against the exact
/// dynamics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloSummary {
    pub schema: SelectionSchema,
    pub population_size: usize,
    pub parent_count: usize,
    pub max_iters: usize,
    pub base_seed: u64,
    pub rng: String,
    pub trials: Vec<TrialResult>,
    pub converged: usize,
    pub not_reached: usize,
    /// Mean over converged trials.
    pub mean_stopping_time: Option<f64>,
    /// Median over all trials with unconverged ones ranked last; `None` if
    /// the median falls on an unconverged trial.
    pub median_stopping_time: Option<f64>,
    /// Sample standard deviation over converged trials.
    pub stddev_stopping_time: Option<f64>,
    /// Exact-dynamics `d(n)` for the configured schema from the uniform start.
    pub reference_d: Vec<f64>,
    pub reference_tau: Option<usize>,
    /// Mean of the per-trial `d_hat(n)`.
    pub mean_d_hat: Vec<f64>,
    /// Mean over trials of `|d_hat(n) - d(n)|`.
    pub mean_abs_error: Vec<f64>,
}

impl MonteCarloSummary {
    /// Empirical quantile of the stopping time (nearest rank) with unconverged
    /// trials ranked last.
    pub fn stopping_time_quantile(&self, q: f64) -> Option<usize> {
        let mut times: Vec<Option<usize>> = self.trials.iter().map(|t| t.stopping_time).collect();
        times.sort_by_key(|t| t.unwrap_or(usize::MAX));
        let rank = ((q.clamp(0.0, 1.0) * times.len() as f64).ceil() as usize).clamp(1, times.len());
        times[rank - 1]
    }
}

/// `replications` independent trials in parallel, aggregated in
/// replication order.
pub fn monte_carlo(problem: &Problem, config: &SimConfig) -> Result<MonteCarloSummary> {
    config.validate()?;
    let max_iters = config.resolved_max_iters(problem)?;
    let fixed = SimConfig { max_iters: Some(max_iters), ..config.clone() };
    let trials = (0..config.replications)
        .into_par_iter()
        .map(|k| run_trial(problem, &fixed, k))
        .collect::<Result<Vec<_>>>()?;

    let start = LevelDistribution::uniform(problem);
    let reference = dynamics::run_with_snapshots(&start, &config.schema, problem, max_iters.max(1), false)?;
    Ok(summarize(config, &fixed, max_iters, trials, reference.d_values(), reference.tau))
}

fn summarize(
    config: &SimConfig,
    fixed: &SimConfig,
    max_iters: usize,
    trials: Vec<TrialResult>,
    reference_d: Vec<f64>,
    reference_tau: Option<usize>,
) -> MonteCarloSummary {
    let times: Vec<f64> = trials.iter().filter_map(|t| t.stopping_time).map(|t| t as f64).collect();
    let converged = times.len();
    let mean = (converged > 0).then(|| times.iter().sum::<f64>() / converged as f64);
    let stddev = mean.map(|m| {
        if converged < 2 {
            0.0
        } else {
            (times.iter().map(|t| (t - m).powi(2)).sum::<f64>() / (converged - 1) as f64).sqrt()
        }
    });

    let mut ranked: Vec<Option<usize>> = trials.iter().map(|t| t.stopping_time).collect();
    ranked.sort_by_key(|t| t.unwrap_or(usize::MAX));
    let len = ranked.len();
    let median = if len % 2 == 1 {
        ranked[len / 2].map(|t| t as f64)
    } else {
        match (ranked[len / 2 - 1], ranked[len / 2]) {
            (Some(a), Some(b)) => Some((a + b) as f64 / 2.0),
            _ => None,
        }
    };

    let horizon = trials.iter().map(|t| t.d_hat_trajectory.len()).max().unwrap_or(0);
    let reference_at = |n: usize| reference_d.get(n).copied().unwrap_or(if reference_tau.is_some() { 0.0 } else { f64::NAN });
    let mut mean_d_hat = Vec::with_capacity(horizon);
    let mut mean_abs_error = Vec::with_capacity(horizon);
    for n in 0..horizon {
        let values: Vec<f64> = trials
            .iter()
            .filter_map(|t| match t.d_hat_trajectory.get(n) {
                Some(&d) => Some(d),
                // a finished trial stays all-optimal
                None if t.stopping_time.is_some() => Some(0.0),
                None => None,
            })
            .collect();
        let count = values.len() as f64;
        let reference = reference_at(n);
        mean_d_hat.push(values.iter().sum::<f64>() / count);
        mean_abs_error.push(values.iter().map(|d| (d - reference).abs()).sum::<f64>() / count);
    }

    MonteCarloSummary {
        schema: config.schema,
        population_size: config.population_size,
        parent_count: fixed.resolved_parent_count().unwrap_or(0),
        max_iters,
        base_seed: config.seed,
        rng: RNG_DESCRIPTION.to_string(),
        converged,
        not_reached: trials.len() - converged,
        trials,
        mean_stopping_time: mean,
        median_stopping_time: median,
        stddev_stopping_time: stddev,
        reference_d,
        reference_tau,
        mean_d_hat,
        mean_abs_error,
    }
}
