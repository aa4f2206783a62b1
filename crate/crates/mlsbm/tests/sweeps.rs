//! Sweep contracts: shared graphs across methods, recomputable rows and the
//! overlap of the two unadjusted second-order aggregations.

use mlsbm::config::{ExperimentConfig, Preset};
use mlsbm::core::cluster::Method;
use mlsbm::experiment::{mean_rate, run_cell, run_experiment, summarize};

fn small_fig2() -> ExperimentConfig {
    let mut c = ExperimentConfig::preset(Preset::Fig2demo);
    c.trials = 3;
    c.rho_grid = vec![0.04, 0.06];
    c
}

#[test]
fn single_method_reruns_match_the_sweep() {
    let full = small_fig2();
    let rows = run_experiment(&full).unwrap();
    for m in [Method::Sum, Method::Sos, Method::SosDebias] {
        let mut one = full.clone();
        one.methods = vec![m];
        let alone = run_experiment(&one).unwrap();
        let from_sweep: Vec<_> = rows.iter().filter(|r| r.method == m).cloned().collect();
        assert_eq!(alone, from_sweep, "{m:?}");
    }
}

#[test]
fn every_row_recomputes_from_its_seed() {
    let c = small_fig2();
    for r in run_experiment(&c).unwrap() {
        let again = run_cell(&c, r.rho, r.trial, r.seed).unwrap();
        assert!(again.contains(&r));
    }
}

#[test]
fn fig3_sos_and_matricize_overlap() {
    let mut c = ExperimentConfig::preset(Preset::Fig3);
    c.trials = 10;
    c.methods = vec![Method::Sos, Method::Matricize];
    let summary = summarize(&run_experiment(&c).unwrap());
    for &rho in &c.rho_grid {
        let (a, b) =
            (mean_rate(&summary, rho, Method::Sos).unwrap(), mean_rate(&summary, rho, Method::Matricize).unwrap());
        assert!((a - b).abs() < 0.02, "rho={rho}: sos {a} matricize {b}");
    }
}
