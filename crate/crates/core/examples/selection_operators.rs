//! One selection step of each operator on a small explicit problem, plus
//! the truncation cut and the exact rational max-of-two law.
//!
//! $ cargo run -p eda-lab --example selection_operators

use eda_lab::selection::{max_of_two_masses, truncation_cut};
use eda_lab::{d_of, LevelDistribution, Problem, SelectionSchema};
use num_rational::Ratio;

fn main() -> eda_lab::Result<()> {
    // seven points, five distinct fitness values, optimum 5
    let problem = Problem::explicit(&[0.0, 1.0, 1.0, 2.0, 3.0, 3.0, 5.0])?;
    let dist = LevelDistribution::uniform(&problem);
    println!("levels {:?}", problem.levels());
    println!("start  {:?}  d = {:.4}", rounded(dist.masses()), d_of(&dist, &problem));

    let cut = truncation_cut(&dist, 0.4)?;
    println!(
        "truncation mu = 0.4 cuts at f = {} keeping {:.3} of that level",
        cut.beta, cut.boundary_fraction
    );

    for schema in [
        SelectionSchema::truncation(0.4)?,
        SelectionSchema::TournamentPaperLiteral,
        SelectionSchema::TournamentTieFair,
    ] {
        let next = schema.select(&dist, &problem)?;
        println!("{schema:<28} {:?}  d = {:.4}", rounded(next.masses()), d_of(&next, &problem));
    }

    let exact: Vec<Ratio<i64>> = vec![Ratio::new(1, 2), Ratio::new(1, 3), Ratio::new(1, 6)];
    let out: Vec<String> = max_of_two_masses(&exact).iter().map(|q| q.to_string()).collect();
    println!("max-of-two of [1/2, 1/3, 1/6] = [{}]", out.join(", "));
    Ok(())
}

fn rounded(m: &[f64]) -> Vec<f64> {
    m.iter().map(|v| (v * 1e4).round() / 1e4).collect()
}
