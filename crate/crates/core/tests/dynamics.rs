//! Engine trajectories against the closed forms and the structural
//! properties of the infinite-population process.

use eda_lab::theory::{lemma4_closed_form, lemma5_closed_form, thm3_exact_tau, thm4_exact_tau, tie_fair_closed_form};
use eda_lab::{d_of, run, verify_drift, EdaError, LevelDistribution, Problem, SelectionSchema};
use proptest::prelude::*;

fn start(d0: f64) -> (Problem, LevelDistribution) {
    let problem = Problem::onemax(6).unwrap();
    let dist = LevelDistribution::with_suboptimal_mass(&problem, d0).unwrap();
    (problem, dist)
}

#[test]
fn onemax6_uniform_truncation_half() {
    let problem = Problem::onemax(6).unwrap();
    let traj = run(&LevelDistribution::uniform(&problem), &SelectionSchema::truncation(0.5).unwrap(), &problem, 100).unwrap();
    assert_eq!(traj.tau, Some(6));
    let expected = [63.0 / 64.0, 62.0 / 64.0, 60.0 / 64.0, 56.0 / 64.0, 48.0 / 64.0, 32.0 / 64.0, 0.0];
    for (d, e) in traj.d_values().iter().zip(expected) {
        assert!((d - e).abs() <= 1e-12, "{d} vs {e}");
    }
    assert!(traj.drift_violations().unwrap().is_empty());
}

#[test]
fn fair_tournament_never_absorbs_but_squares() {
    let (problem, dist) = start(0.5);
    let traj = run(&dist, &SelectionSchema::TournamentTieFair, &problem, 5).unwrap();
    assert_eq!(traj.tau, None);
    for (n, d) in traj.d_values().iter().enumerate() {
        assert!((d - tie_fair_closed_form(0.5, n)).abs() <= 1e-15);
    }
    assert!(matches!(verify_drift(&traj.records, &traj.schema), Err(EdaError::UnsupportedSchema(_))));
}

#[test]
fn snapshots_follow_max_iters() {
    let (problem, dist) = start(0.9);
    let s = SelectionSchema::truncation(0.5).unwrap();
    let short = run(&dist, &s, &problem, 50).unwrap();
    let snaps = short.snapshots.as_ref().unwrap();
    assert_eq!(snaps.len(), short.records.len() + 1);
    for (snap, d) in snaps.iter().zip(short.d_values()) {
        assert_eq!(d_of(snap, &problem), d);
    }
    assert!(run(&dist, &s, &problem, 20_000).unwrap().snapshots.is_none());
    assert!(matches!(run(&dist, &s, &problem, 0), Err(EdaError::Config(_))));
}

#[test]
fn already_optimal_stops_at_zero() {
    let (problem, dist) = start(0.0);
    for s in [SelectionSchema::truncation(0.3).unwrap(), SelectionSchema::TournamentPaperLiteral, SelectionSchema::TournamentTieFair] {
        let traj = run(&dist, &s, &problem, 10).unwrap();
        assert_eq!(traj.tau, Some(0));
        assert!(traj.records.is_empty());
    }
}

proptest! {
    #[test]
    fn truncation_matches_closed_form(d0 in 0.01f64..0.999, mu in 0.05f64..0.95) {
        let (problem, dist) = start(d0);
        let traj = run(&dist, &SelectionSchema::truncation(mu).unwrap(), &problem, 10_000).unwrap();
        let tau = traj.tau.unwrap();
        prop_assert_eq!(tau as u64, thm3_exact_tau(d0, mu).unwrap().iterations);
        for (n, d) in traj.d_values().iter().enumerate() {
            prop_assert!((d - lemma4_closed_form(d0, mu, n).unwrap()).abs() <= 1e-12);
        }
    }

    #[test]
    fn doubling_tournament_matches_closed_form(d0 in 0.01f64..0.999) {
        let (problem, dist) = start(d0);
        let traj = run(&dist, &SelectionSchema::TournamentPaperLiteral, &problem, 100).unwrap();
        prop_assert_eq!(traj.tau.unwrap() as u64, thm4_exact_tau(d0).unwrap().iterations);
        for (n, d) in traj.d_values().iter().enumerate() {
            prop_assert!((d - lemma5_closed_form(d0, n).unwrap()).abs() <= 1e-12);
        }
    }

    #[test]
    fn suboptimal_mass_is_a_supermartingale(d0 in 0.0f64..0.999, mu in 0.05f64..0.95, which in 0usize..3) {
        let (problem, dist) = start(d0);
        let s = [SelectionSchema::truncation(mu).unwrap(), SelectionSchema::TournamentPaperLiteral, SelectionSchema::TournamentTieFair][which];
        let traj = run(&dist, &s, &problem, 40).unwrap();
        let ds = traj.d_values();
        for w in ds.windows(2) {
            prop_assert!(w[1] <= w[0]);
        }
        // once absorbed, further steps stay absorbed
        let again = s.select(&traj.final_distribution, &problem).unwrap();
        if traj.tau.is_some() {
            prop_assert_eq!(d_of(&again, &problem), 0.0);
        }
    }

    #[test]
    fn optimal_expected_fitness_iff_absorbed(d0 in 0.0f64..0.999, mu in 0.05f64..0.95) {
        let (problem, dist) = start(d0);
        let traj = run(&dist, &SelectionSchema::truncation(mu).unwrap(), &problem, 10_000).unwrap();
        for snap in traj.snapshots.unwrap() {
            let d = d_of(&snap, &problem);
            prop_assert_eq!(snap.expected_fitness() == problem.f_max(), d == 0.0);
        }
    }

    #[test]
    fn truncation_drift_identity_along_runs(d0 in 0.01f64..0.999, mu in 0.05f64..0.95) {
        let (problem, dist) = start(d0);
        let traj = run(&dist, &SelectionSchema::truncation(mu).unwrap(), &problem, 10_000).unwrap();
        prop_assert!(traj.drift_violations().unwrap().is_empty());
    }
}
