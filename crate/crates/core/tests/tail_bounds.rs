//! Monte-Carlo checks that the evaluated tail and norm bounds dominate the
//! simulated statistics at the two-block, thirty-layer scale.

use mlsbm_core::concentration::{
    bernoulli_bernstein, bound_linear_symmetric, bound_quadratic_sym, bound_s1_sparse, linear_bound_stats,
    mc_replicate, quantile_sorted, sbm_linear_noise, sigma_profile, NoiseParams, Statistic,
};
use mlsbm_core::linalg::{operator_norm, Matrix};
use mlsbm_core::rng::substream;
use mlsbm_core::sbm::{population_matrices, presets, sample};

const REPS: u64 = 1000;

#[test]
fn linear_tail_bound_dominates_empirical_exceedance() {
    let rho = 0.04;
    let spec = presets::fig2demo(rho, 1).unwrap();
    let n = spec.n();
    let pops: Vec<Matrix> = population_matrices(&spec).into_iter().map(|p| p.into_matrix()).collect();
    let p_max = pops.iter().map(Matrix::max_abs).fold(0.0, f64::max);
    let params = bernoulli_bernstein(p_max).unwrap().linear;
    let stats = linear_bound_stats(&pops).unwrap();

    let mut norms: Vec<f64> = (0..REPS)
        .map(|r| operator_norm(&sbm_linear_noise(&sample(&spec, substream(77, &[r])), &spec).unwrap()).unwrap())
        .collect();
    norms.sort_by(f64::total_cmp);
    let max = *norms.last().unwrap();

    let bound = |t: f64| bound_linear_symmetric(t, n, n, params, &stats).unwrap();
    for level in [0.5, 0.1, 0.01] {
        // The bound decreases in t; bisect for the level crossing.
        let (mut lo, mut hi) = (1e-9, max.max(1.0));
        while bound(hi) > level {
            hi *= 2.0;
        }
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if bound(mid) > level {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let freq = norms.iter().filter(|&&v| v >= hi).count() as f64 / REPS as f64;
        let slack = 3.0 * (level * (1.0 - level) / REPS as f64).sqrt();
        assert!(freq <= level + slack, "t = {hi}: empirical {freq} exceeds bound {level}");
        assert!(hi >= norms[(REPS as usize) / 2], "bound at level {level} falls below the median norm");
    }
}

#[test]
fn quadratic_bound_dominates_simulated_s1() {
    let (n, rho) = (200, 0.04);
    let params = NoiseParams::bernoulli(rho).unwrap();
    for l in [8usize, 32] {
        let gs = vec![Matrix::identity(n); l];
        let profile = sigma_profile(&gs).unwrap();
        let bound = bound_quadratic_sym(l, n, &params, &profile, 1.0);
        for r in 0..10 {
            let s1 = mc_replicate(Statistic::S1, n, l, rho, substream(5, &[l as u64, r])).unwrap();
            assert!(s1 <= bound.s1, "L = {l}: ‖S₁‖ = {s1} above {}", bound.s1);
            let s2 = mc_replicate(Statistic::S2Centered, n, l, rho, substream(6, &[l as u64, r])).unwrap();
            assert!(s2 <= bound.s2, "L = {l}: ‖S₂ − ES₂‖ = {s2} above {}", bound.s2);
        }
    }
}

fn median_of(statistic: Statistic, n: usize, l: usize, rho: f64, reps: u64, base: u64) -> f64 {
    let mut v: Vec<f64> =
        (0..reps).map(|r| mc_replicate(statistic, n, l, rho, substream(base, &[l as u64, r])).unwrap()).collect();
    v.sort_by(f64::total_cmp);
    quantile_sorted(&v, 0.5)
}

#[test]
fn sparse_s1_bound_holds_across_layers_after_one_calibration() {
    let (n, rho) = (200, 0.04);
    let grid = [(8usize, 200u64), (16, 200), (30, 500), (60, 200)];
    let first = median_of(Statistic::S1, n, grid[0].0, rho, grid[0].1, 21);
    let c = first / bound_s1_sparse(grid[0].0, n, rho, 1.0);
    for &(l, reps) in &grid[1..] {
        let median = median_of(Statistic::S1, n, l, rho, reps, 21);
        let bound = bound_s1_sparse(l, n, rho, c);
        assert!(median <= bound, "L = {l}: median {median} above calibrated bound {bound}");
    }
}

#[test]
fn decoupled_statistic_is_comparable() {
    let (n, l, rho) = (200, 30, 0.04);
    let s1 = median_of(Statistic::S1, n, l, rho, 50, 31);
    let ds1 = median_of(Statistic::DecoupledS1, n, l, rho, 50, 32);
    let ratio = ds1 / s1;
    assert!((0.1..=10.0).contains(&ratio), "median ratio {ratio}");
}
