//! Finite search spaces, fitness functions and fitness-level distributions.
//!
//! Both selection operators depend on a point only through its fitness, so the
//! state of the infinite-population EDA is kept as a distribution over the
//! distinct fitness values of the problem (its *levels*) rather than over the
//! points themselves.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{EdaError, Result};

/// Largest bitstring length for which the space is enumerated explicitly.
pub const MAX_ONEMAX_BITS: u32 = 24;

/// Tolerance on the total mass of a [`LevelDistribution`].
pub const MASS_TOL: f64 = 1e-12;

/// Operators renormalize their output when the total mass is within this
/// distance of 1 and fail with [`EdaError::Consistency`] beyond it.
pub const RENORM_TOL: f64 = 1e-9;

/// A point of the search space, identified by its index.
///
/// For bitstring spaces the index is the bitstring itself.
pub type Point = u32;

#[derive(Debug, Clone, PartialEq)]
enum FitnessFn {
    OneMax { bits: u32 },
    Table { values: Vec<f64>, labels: Option<Vec<String>> },
}

/// A finite maximization problem: a search space, a nonnegative fitness,
/// its maximum and the number of points attaining it.
#[derive(Debug, Clone, PartialEq)]
pub struct Problem {
    fitness: FitnessFn,
    f_max: f64,
    optimal_count: u64,
    levels: Vec<f64>,
    level_counts: Vec<u64>,
}

impl Problem {
    /// OneMax on bitstrings of length `bits`: fitness is the number of ones.
    pub fn onemax(bits: u32) -> Result<Self> {
        if !(1..=MAX_ONEMAX_BITS).contains(&bits) {
            return Err(EdaError::Config(format!(
                "onemax length must be in 1..={MAX_ONEMAX_BITS}, got {bits}"
            )));
        }
        let levels = (0..=bits).map(f64::from).collect();
        let level_counts = (0..=bits).map(|k| binomial(bits, k)).collect();
        Ok(Self {
            fitness: FitnessFn::OneMax { bits },
            f_max: f64::from(bits),
            optimal_count: 1,
            levels,
            level_counts,
        })
    }

    /// A problem given by an explicit fitness table; point `i` has fitness
    /// `fitness[i]`.
    pub fn explicit(fitness: &[f64]) -> Result<Self> {
        Self::build_table(fitness.to_vec(), None)
    }

    /// Like [`Problem::explicit`], keeping a label for every point.
    pub fn explicit_points<T: ToString>(points: &[T], fitness: &[f64]) -> Result<Self> {
        if points.len() != fitness.len() {
            return Err(EdaError::Config(format!(
                "{} points but {} fitness values",
                points.len(),
                fitness.len()
            )));
        }
        let labels = points.iter().map(ToString::to_string).collect();
        Self::build_table(fitness.to_vec(), Some(labels))
    }

    fn build_table(mut values: Vec<f64>, labels: Option<Vec<String>>) -> Result<Self> {
        if values.is_empty() {
            return Err(EdaError::Config("explicit problem needs at least one point".into()));
        }
        if values.len() > u32::MAX as usize {
            return Err(EdaError::Config("explicit problem is too large".into()));
        }
        if let Some((i, v)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(EdaError::Domain(format!("fitness of point {i} is not finite: {v}")));
        }
        if let Some((i, v)) = values.iter().enumerate().find(|(_, v)| **v < 0.0) {
            return Err(EdaError::Domain(format!("fitness of point {i} is negative: {v}")));
        }

        // fold -0.0 into 0.0 so levels compare by total order
        for v in &mut values {
            *v += 0.0;
        }
        let mut sorted = values.clone();
        sorted.sort_by(f64::total_cmp);
        let mut levels: Vec<f64> = Vec::new();
        let mut level_counts: Vec<u64> = Vec::new();
        for v in sorted {
            match levels.last() {
                Some(&last) if last == v => *level_counts.last_mut().unwrap() += 1,
                _ => {
                    levels.push(v);
                    level_counts.push(1);
                }
            }
        }
        let f_max = *levels.last().unwrap();
        let optimal_count = *level_counts.last().unwrap();
        Ok(Self {
            fitness: FitnessFn::Table { values, labels },
            f_max,
            optimal_count,
            levels,
            level_counts,
        })
    }

    pub fn f_max(&self) -> f64 {
        self.f_max
    }

    /// Size of the optimal set.
    pub fn optimal_count(&self) -> u64 {
        self.optimal_count
    }

    pub fn space_size(&self) -> u64 {
        match &self.fitness {
            FitnessFn::OneMax { bits } => 1u64 << bits,
            FitnessFn::Table { values, .. } => values.len() as u64,
        }
    }

    /// Distinct fitness values, strictly increasing. The last one is `f_max`.
    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    /// Number of points at each level, aligned with [`Problem::levels`].
    pub fn level_counts(&self) -> &[u64] {
        &self.level_counts
    }

    /// Fitness of a point. Panics if the point is outside the space.
    pub fn fitness(&self, point: Point) -> f64 {
        match &self.fitness {
            FitnessFn::OneMax { bits } => {
                assert!(u64::from(point) < (1u64 << bits), "point {point} outside the space");
                f64::from(point.count_ones())
            }
            FitnessFn::Table { values, .. } => values[point as usize],
        }
    }

    /// Index into [`Problem::levels`] of the level a point belongs to.
    pub fn level_of(&self, point: Point) -> usize {
        match &self.fitness {
            FitnessFn::OneMax { .. } => self.fitness(point) as usize,
            FitnessFn::Table { values, .. } => {
                let f = values[point as usize];
                self.levels
                    .binary_search_by(|l| l.total_cmp(&f))
                    .expect("fitness value is one of the levels")
            }
        }
    }

    pub fn is_optimal(&self, point: Point) -> bool {
        self.fitness(point) == self.f_max
    }

    pub fn point_label(&self, point: Point) -> String {
        match &self.fitness {
            FitnessFn::OneMax { bits } => format!("{:0width$b}", point, width = *bits as usize),
            FitnessFn::Table { labels: Some(labels), .. } => labels[point as usize].clone(),
            FitnessFn::Table { labels: None, .. } => point.to_string(),
        }
    }

    /// All points of the space in index order.
    pub fn points(&self) -> impl Iterator<Item = Point> {
        // space_size() <= 2^24 for bitstrings and <= u32::MAX for tables
        0..self.space_size() as Point
    }

    /// A point drawn uniformly from the space.
    pub fn sample_point<R: Rng + ?Sized>(&self, rng: &mut R) -> Point {
        rng.gen_range(0..self.space_size()) as Point
    }
}

fn binomial(n: u32, k: u32) -> u64 {
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * u64::from(n - i) / u64::from(i + 1))
}

/// Config-file descriptor of a problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum ProblemSpec {
    Onemax { bits: u32 },
    Explicit { fitness: Vec<f64> },
}

impl ProblemSpec {
    pub fn build(&self) -> Result<Problem> {
        match self {
            ProblemSpec::Onemax { bits } => Problem::onemax(*bits),
            ProblemSpec::Explicit { fitness } => Problem::explicit(fitness),
        }
    }
}

/// Probability mass over the fitness levels of a problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelDistribution {
    levels: Vec<f64>,
    mass: Vec<f64>,
}

impl LevelDistribution {
    /// Checked constructor: levels strictly increasing, masses nonnegative
    /// and summing to 1 within [`MASS_TOL`].
    pub fn new(levels: Vec<f64>, mass: Vec<f64>) -> Result<Self> {
        if levels.is_empty() || levels.len() != mass.len() {
            return Err(EdaError::Domain(format!(
                "need one mass per level, got {} levels and {} masses",
                levels.len(),
                mass.len()
            )));
        }
        if levels.windows(2).any(|w| w[0].partial_cmp(&w[1]) != Some(std::cmp::Ordering::Less)) {
            return Err(EdaError::Domain("levels must be strictly increasing".into()));
        }
        if mass.iter().any(|m| !m.is_finite() || *m < 0.0) {
            return Err(EdaError::Domain("masses must be finite and nonnegative".into()));
        }
        let total: f64 = mass.iter().sum();
        if (total - 1.0).abs() > MASS_TOL {
            return Err(EdaError::Domain(format!("masses sum to {total}, not 1")));
        }
        Ok(Self { levels, mass })
    }

    /// Build from operator output, renormalizing small drift and rejecting
    /// anything larger than [`RENORM_TOL`].
    pub(crate) fn renormalized(levels: Vec<f64>, mut mass: Vec<f64>) -> Result<Self> {
        let total: f64 = mass.iter().sum();
        if total.is_nan() || (total - 1.0).abs() > RENORM_TOL {
            return Err(EdaError::Consistency(format!(
                "operator output mass is {total}, off by more than {RENORM_TOL}"
            )));
        }
        for m in &mut mass {
            *m /= total;
        }
        Ok(Self { levels, mass })
    }

    /// The uniform point distribution collapsed onto levels:
    /// the mass of a level is its share of the search space.
    pub fn uniform(problem: &Problem) -> Self {
        let size = problem.space_size() as f64;
        let mass = problem.level_counts().iter().map(|&c| c as f64 / size).collect();
        Self { levels: problem.levels().to_vec(), mass }
    }

    /// Uniform over the points, then rescaled so the optimal level holds
    /// exactly `1 - d0`. The suboptimal levels keep their uniform proportions.
    pub fn with_suboptimal_mass(problem: &Problem, d0: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&d0) {
            return Err(EdaError::Domain(format!("d0 must lie in [0, 1], got {d0}")));
        }
        let uniform = Self::uniform(problem);
        let top = uniform.mass.len() - 1;
        let sub_total: f64 = uniform.mass[..top].iter().sum();
        if sub_total == 0.0 && d0 > 0.0 {
            return Err(EdaError::Domain(format!(
                "every point is optimal, so d0 must be 0 (got {d0})"
            )));
        }
        let mut mass: Vec<f64> = uniform.mass[..top]
            .iter()
            .map(|m| if sub_total > 0.0 { m / sub_total * d0 } else { 0.0 })
            .collect();
        mass.push(1.0 - d0);
        Ok(Self { levels: uniform.levels, mass })
    }

    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    pub fn masses(&self) -> &[f64] {
        &self.mass
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    /// Mass on the highest level.
    pub fn top_mass(&self) -> f64 {
        *self.mass.last().expect("distribution is nonempty")
    }

    pub fn expected_fitness(&self) -> f64 {
        self.levels.iter().zip(&self.mass).map(|(l, m)| l * m).sum()
    }

    /// Mass at `level`, 0 if the level is not in the support.
    pub fn mass_at(&self, level: f64) -> f64 {
        self.levels
            .iter()
            .position(|&l| l == level)
            .map_or(0.0, |i| self.mass[i])
    }
}

/// Fraction of the population outside the optimal set: one minus the mass
/// at `f_max`.
pub fn d_of(dist: &LevelDistribution, problem: &Problem) -> f64 {
    (1.0 - dist.mass_at(problem.f_max())).clamp(0.0, 1.0)
}
