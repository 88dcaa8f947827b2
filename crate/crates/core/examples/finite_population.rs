//! Finite populations on OneMax(6) against the exact dynamics. Truncation
//! tracks the exact stopping time; two-tournament with real tournaments
//! follows the max-of-two law and needs more generations.
//!
//! $ cargo run -p eda-lab --release --example finite_population [N] [replications]

use eda_lab::{monte_carlo, Problem, SelectionSchema, SimConfig};

fn main() -> eda_lab::Result<()> {
    let mut args = std::env::args().skip(1).map(|a| a.parse::<usize>().expect("integer argument"));
    let n = args.next().unwrap_or(20_000);
    let reps = args.next().unwrap_or(40);
    let problem = Problem::onemax(6)?;

    for schema in [SelectionSchema::truncation(0.5)?, SelectionSchema::TournamentPaperLiteral] {
        let summary = monte_carlo(&problem, &SimConfig::new(n, schema, 1, reps))?;
        println!("{schema}: N = {n}, Se = {}, {reps} runs", summary.parent_count);
        println!(
            "  stopping time median {:?}, mean {:.2}, 5%-95% {:?}..{:?}, exact tau {:?}",
            summary.median_stopping_time,
            summary.mean_stopping_time.unwrap_or(f64::NAN),
            summary.stopping_time_quantile(0.05),
            summary.stopping_time_quantile(0.95),
            summary.reference_tau,
        );
        for (k, (sim, exact)) in summary.mean_d_hat.iter().zip(&summary.reference_d).enumerate().take(8) {
            println!("  n = {k}: mean d_hat {sim:.5}  exact d {exact:.5}");
        }
    }
    Ok(())
}
