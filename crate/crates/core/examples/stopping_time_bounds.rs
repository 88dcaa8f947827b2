//! Upper bounds against exact stopping times over a few starting points,
//! and the full report for d0 = 63/64.
//!
//! $ cargo run -p eda-lab --example stopping_time_bounds

use eda_lab::theory::bounds_grid;
use eda_lab::{run, BoundReport, LevelDistribution, Problem, SelectionSchema};

fn main() -> eda_lab::Result<()> {
    let d0s = [0.5, 0.9, 63.0 / 64.0, 0.999];
    let mus = [0.2, 0.5, 0.8];
    println!("{:>9} {:>4} {:>10} {:>8} {:>4} {:>10} {:>8} {:>4}", "d0", "mu", "trunc bnd", "tau", "it", "tour bnd", "tau", "it");
    for r in bounds_grid(&d0s, &mus)? {
        println!(
            "{:>9.6} {:>4} {:>10.3} {:>8.3} {:>4} {:>10.3} {:>8.3} {:>4}",
            r.d0, r.mu, r.thm1_bound, r.thm3_tau_real, r.thm3_tau_iterations, r.thm2_bound, r.thm4_tau_real, r.thm4_tau_iterations
        );
    }

    let problem = Problem::onemax(6)?;
    let start = LevelDistribution::uniform(&problem);
    for schema in [SelectionSchema::truncation(0.5)?, SelectionSchema::TournamentPaperLiteral, SelectionSchema::TournamentTieFair] {
        let traj = run(&start, &schema, &problem, 60)?;
        let report = BoundReport::new(traj.d0, &schema, traj.tau)?;
        println!("\n{schema}");
        println!("  bound          {:?}", report.thm_upper_bound);
        println!("  exact tau      {:?} -> {:?} iterations", report.exact_tau_real, report.exact_tau_iterations);
        println!("  engine tau     {:?}", report.engine_tau);
        if let Some(note) = &report.note {
            println!("  note           {note}");
        }
    }
    Ok(())
}
