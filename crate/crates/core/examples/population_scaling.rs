//! How fast the one-step empirical suboptimal fraction approaches the
//! infinite-population value as N grows (truncation, mu = 0.5).
//!
//! $ cargo run -p eda-lab --release --example population_scaling

use eda_lab::{monte_carlo, Problem, SelectionSchema, SimConfig};

fn main() -> eda_lab::Result<()> {
    let problem = Problem::onemax(6)?;
    let mut previous: Option<f64> = None;
    for n in [100, 1_000, 10_000, 100_000] {
        let mut config = SimConfig::new(n, SelectionSchema::truncation(0.5)?, 42, 100);
        config.max_iters = Some(2);
        let summary = monte_carlo(&problem, &config)?;
        let err = summary.mean_abs_error[1];
        let shrink = previous.map_or(String::new(), |p| format!("  (x{:.2})", err / p));
        println!("N = {n:>6}: mean |d_hat(1) - d(1)| = {err:.3e}{shrink}");
        previous = Some(err);
    }
    println!("an N^(-1/2) rate shrinks by about 0.32 per decade");
    Ok(())
}
