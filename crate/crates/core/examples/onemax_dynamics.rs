//! Exact infinite-population run on OneMax with 6 bits, truncation at
//! mu = 0.5, starting from the uniform distribution.
//!
//! $ cargo run -p eda-lab --example onemax_dynamics

use eda_lab::theory::lemma4_closed_form;
use eda_lab::{run, LevelDistribution, Problem, SelectionSchema};

fn main() -> eda_lab::Result<()> {
    let problem = Problem::onemax(6)?;
    let start = LevelDistribution::uniform(&problem);
    let schema = SelectionSchema::truncation(0.5)?;
    let traj = run(&start, &schema, &problem, 100)?;

    println!("{schema}, {} levels, d0 = {}", problem.levels().len(), traj.d0);
    println!("{:>3} {:>10} {:>10} {:>10}", "n", "d", "closed", "drift");
    for (n, d) in traj.d_values().iter().enumerate() {
        let drift = traj.records.get(n).map_or(String::new(), |r| format!("{:.6}", r.realized_drift));
        println!("{n:>3} {d:>10.6} {:>10.6} {drift:>10}", lemma4_closed_form(traj.d0, 0.5, n)?);
    }
    println!("absorbed at n = {:?}", traj.tau);

    // mass per fitness level just before absorption
    let snaps = traj.snapshots.as_ref().expect("short runs keep snapshots");
    let before = &snaps[snaps.len() - 2];
    for (f, m) in before.levels().iter().zip(before.masses()) {
        println!("  f = {f}: {m:.4}");
    }
    Ok(())
}
