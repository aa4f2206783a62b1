//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! `cargo test -p mlsbm --test acceptance -- 3 7` runs a subset. Failures are
//! reported but only fail the process when `MLSBM_ACCEPTANCE_STRICT=1`.

use std::process::ExitCode;
use std::time::Instant;

use mlsbm::config::{ExperimentConfig, Preset, DEFAULT_SEED};
use mlsbm::core::aggregate::{matricize, population_sos_with_bias, sum_of_squares};
use mlsbm::core::cluster::{misclustering, EigenOrder, Estimator, Method};
use mlsbm::core::concentration::{
    bernoulli_bernstein, centered_bernoulli_abs_moment, counting_checks, decoupled_stat, quadratic_split_asym,
    quadratic_split_sym, sigma_profile, verify_bernstein, McConfig, Statistic,
};
use mlsbm::core::linalg::{operator_norm, sym_eigen, symmetric_dilation, Matrix, SymMatrix};
use mlsbm::core::rng::{substream, SplitMix64};
use mlsbm::core::sbm::{exhaustive_least_squares, presets, sample, Membership, ModelSpec};
use mlsbm::experiment::{mean_rate, run_experiment, run_mc, summarize, SummaryRow};

type Outcome = Result<String, String>;
type Criterion = (u32, &'static str, fn() -> Outcome);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn rate(summary: &[SummaryRow], rho: f64, m: Method) -> f64 {
    mean_rate(summary, rho, m).unwrap_or_else(|| panic!("no {} row at rho={rho}", m.name()))
}

fn fig2_ordering() -> Outcome {
    let config = ExperimentConfig::preset(Preset::Fig2demo);
    assert_eq!(config.trials, 100);
    let s = summarize(&run_experiment(&config).map_err(|e| e.to_string())?);
    let mut ok = true;
    let mut detail = Vec::new();
    for &rho in config.rho_grid.iter().filter(|&&r| r >= 0.04 - 1e-12) {
        let (sum, sos, deb) =
            (rate(&s, rho, Method::Sum), rate(&s, rho, Method::Sos), rate(&s, rho, Method::SosDebias));
        ok &= deb < sum && deb < sos;
        detail.push(format!("rho={rho}: sum={sum:.4} sos={sos:.4} sos_debias={deb:.4}"));
    }
    let top = rate(&s, 0.06, Method::SosDebias);
    ok &= top <= 0.15;
    check(ok, detail.join("; "))
}

fn fig3_curves() -> Outcome {
    let config = ExperimentConfig { trials: 25, ..ExperimentConfig::preset(Preset::Fig3) };
    let s = summarize(&run_experiment(&config).map_err(|e| e.to_string())?);
    let mut failures = Vec::new();
    for &rho in &config.rho_grid {
        let sum = rate(&s, rho, Method::Sum);
        if sum < 0.2 {
            failures.push(format!("(a) sum={sum:.4} at rho={rho}"));
        }
        let (sos, mat) = (rate(&s, rho, Method::Sos), rate(&s, rho, Method::Matricize));
        if (sos - mat).abs() > 0.02 {
            failures.push(format!("(b) |sos-matricize|={:.4} at rho={rho}", (sos - mat).abs()));
        }
    }
    let deb_15 = rate(&s, 0.15, Method::SosDebias);
    // 0.13 is off the 15-point grid, so it runs as its own cell set with an
    // independent seed.
    let extra = ExperimentConfig {
        rho_grid: vec![0.13],
        base_seed: substream(config.base_seed, &[13]),
        methods: vec![Method::Sos, Method::SosDebias],
        ..config.clone()
    };
    let s13 = summarize(&run_experiment(&extra).map_err(|e| e.to_string())?);
    let (sos_13, deb_13) = (rate(&s13, 0.13, Method::Sos), rate(&s13, 0.13, Method::SosDebias));
    if deb_15 > 0.05 {
        failures.push(format!("(c) sos_debias={deb_15:.4} at rho=0.15"));
    }
    if sos_13 - deb_13 < 0.1 {
        failures.push(format!("(c) sos-sos_debias={:.4} at rho=0.13", sos_13 - deb_13));
    }
    let sums: Vec<f64> = config.rho_grid.iter().map(|&r| rate(&s, r, Method::Sum)).collect();
    let detail = format!(
        "sum in [{:.3}, {:.3}]; max |sos-matricize|={:.4}; sos_debias(0.15)={deb_15:.4}; sos(0.13)={sos_13:.4} sos_debias(0.13)={deb_13:.4}",
        sums.iter().copied().fold(f64::INFINITY, f64::min),
        sums.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        config
            .rho_grid
            .iter()
            .map(|&r| (rate(&s, r, Method::Sos) - rate(&s, r, Method::Matricize)).abs())
            .fold(0.0, f64::max),
    );
    if failures.is_empty() {
        Ok(detail)
    } else {
        Err(format!("{detail}; failed: {}", failures.join(", ")))
    }
}

/// Not a criterion: the same two densities with eigenvectors chosen by signed
/// eigenvalue instead of magnitude.
fn fig3_signed_order() -> String {
    let config = ExperimentConfig {
        trials: 25,
        rho_grid: vec![0.13, 0.15],
        methods: vec![Method::Sos, Method::SosDebias],
        order: EigenOrder::Signed,
        ..ExperimentConfig::preset(Preset::Fig3)
    };
    match run_experiment(&config) {
        Ok(rows) => {
            let s = summarize(&rows);
            format!(
                "signed order: sos(0.13)={:.4} sos_debias(0.13)={:.4} sos_debias(0.15)={:.4}",
                rate(&s, 0.13, Method::Sos),
                rate(&s, 0.13, Method::SosDebias),
                rate(&s, 0.15, Method::SosDebias)
            )
        }
        Err(e) => format!("signed order: {e}"),
    }
}

fn population_gap() -> Outcome {
    let gap = |rho: f64| -> Result<_, String> {
        let spec = presets::fig3(rho).map_err(|e| e.to_string())?;
        population_sos_with_bias(&spec).and_then(|p| p.gap(3)).map_err(|e| e.to_string())
    };
    let (lo, hi) = (gap(0.025)?, gap(0.2)?);
    let (lo_next, hi_next) = match (lo.over_next, hi.over_next) {
        (Some(l), Some(h)) => (l, h),
        _ => return Err(format!("lambda_4 vanishes: {lo:?} {hi:?}")),
    };
    // The low-density gap can be exactly zero, so compare by multiplication.
    check(
        hi.over_kth >= 3.0 * lo.over_kth && hi_next >= 3.0 * lo_next,
        format!(
            "(l3-l4)/l3: {:.4e} -> {:.4e}; (l3-l4)/l4: {lo_next:.4e} -> {hi_next:.4e} (rho 0.025 -> 0.2)",
            lo.over_kth, hi.over_kth
        ),
    )
}

fn s1_scaling() -> Outcome {
    let config = McConfig {
        statistic: Statistic::S1,
        n: 200,
        l_grid: vec![8, 16, 32, 64, 128],
        rho_grid: vec![0.04],
        reps: 200,
        seed: DEFAULT_SEED,
    };
    let study = run_mc(&config).map_err(|e| e.to_string())?;
    let slope = study.slopes[0].1.ok_or("slope undefined")?;
    let medians: Vec<String> = study.points.iter().map(|p| format!("{}:{:.2}", p.l, p.median)).collect();
    check((0.4..=0.6).contains(&slope), format!("slope={slope:.4}; medians {}", medians.join(" ")))
}

fn gaussian_matrix(rows: usize, cols: usize, rng: &mut SplitMix64) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| rng.next_gaussian())
}

fn symmetric_matrix(n: usize, rng: &mut SplitMix64) -> Matrix {
    let a = gaussian_matrix(n, n, rng);
    Matrix::from_fn(n, n, |i, j| if i <= j { a[(i, j)] } else { a[(j, i)] })
}

/// `Σℓ Σ_{i,j,i',j'} X_ij G_jj' Y_i'j' eᵢeᵢ'ᵀ` and the part with `(i', j')`
/// equal to `(i, j)` or, for symmetric noise, to `(j, i)`.
fn quadruple_loop(xs: &[Matrix], ys: &[Matrix], gs: &[Matrix], symmetric: bool) -> (Matrix, Matrix) {
    let (n, r) = (xs[0].rows(), xs[0].cols());
    let (mut s, mut s2) = (Matrix::zeros(n, n), Matrix::zeros(n, n));
    for ((x, y), g) in xs.iter().zip(ys).zip(gs) {
        for i in 0..n {
            for j in 0..r {
                for ip in 0..n {
                    for jp in 0..r {
                        let t = x[(i, j)] * g[(j, jp)] * y[(ip, jp)];
                        s[(i, ip)] += t;
                        if (ip, jp) == (i, j) || (symmetric && (ip, jp) == (j, i)) {
                            s2[(i, ip)] += t;
                        }
                    }
                }
            }
        }
    }
    (s, s2)
}

fn split_exactness() -> Outcome {
    let mut rng = SplitMix64::new(substream(DEFAULT_SEED, &[5]));
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let n = 1 + rng.below(6) as usize;
        let r = 1 + rng.below(6) as usize;
        let l = 1 + rng.below(3) as usize;
        let gs_sq: Vec<Matrix> = (0..l).map(|_| gaussian_matrix(n, n, &mut rng)).collect();
        let gs_rect: Vec<Matrix> = (0..l).map(|_| gaussian_matrix(r, r, &mut rng)).collect();
        let sym: Vec<Matrix> = (0..l).map(|_| symmetric_matrix(n, &mut rng)).collect();
        let sym_tilde: Vec<Matrix> = (0..l).map(|_| symmetric_matrix(n, &mut rng)).collect();
        let rect: Vec<Matrix> = (0..l).map(|_| gaussian_matrix(n, r, &mut rng)).collect();
        let rect_tilde: Vec<Matrix> = (0..l).map(|_| gaussian_matrix(n, r, &mut rng)).collect();

        let cases = [
            (quadratic_split_sym(&sym, &gs_sq), quadruple_loop(&sym, &sym, &gs_sq, true)),
            (quadratic_split_asym(&rect, &gs_rect), quadruple_loop(&rect, &rect, &gs_rect, false)),
            (decoupled_stat(&sym, &sym_tilde, &gs_sq, true), quadruple_loop(&sym, &sym_tilde, &gs_sq, true)),
            (decoupled_stat(&rect, &rect_tilde, &gs_rect, false), quadruple_loop(&rect, &rect_tilde, &gs_rect, false)),
        ];
        for (split, (s, s2)) in cases {
            let q = split.map_err(|e| e.to_string())?;
            let recomposed = q.s1.add(&q.s2).map_err(|e| e.to_string())?;
            for d in [q.s.max_abs_diff(&s), q.s2.max_abs_diff(&s2), recomposed.max_abs_diff(&s)] {
                worst = worst.max(d.ok_or("shape mismatch")?);
            }
        }
    }
    check(worst <= 1e-12, format!("max entrywise deviation {worst:.2e} over 1000 instances x 4 variants"))
}

fn oracle_agreement_with(order: EigenOrder) -> Result<usize, String> {
    let b = SymMatrix::new(Matrix::from_rows(&[[0.9, 0.1], [0.1, 0.9]]).unwrap()).unwrap();
    let spec = ModelSpec::new(Membership::from_sizes(&[4, 4]).unwrap(), 1.0, vec![b; 3]).map_err(|e| e.to_string())?;
    let mut agree = 0;
    for s in 0..50u64 {
        let seed = substream(DEFAULT_SEED, &[6, s]);
        let g = sample(&spec, substream(seed, &[0]));
        let est = Estimator::new(2, Method::SosDebias)
            .order(order)
            .estimate(&g, substream(seed, &[2]))
            .map_err(|e| e.to_string())?;
        let best = exhaustive_least_squares(&g, 2).map_err(|e| e.to_string())?;
        if misclustering(&est, &best).map_err(|e| e.to_string())?.count == 0 {
            agree += 1;
        }
    }
    Ok(agree)
}

fn oracle_agreement() -> Outcome {
    let agree = oracle_agreement_with(EigenOrder::default())?;
    check(agree >= 45, format!("{agree}/50 seeds agree with the exhaustive least-squares fit"))
}

fn sigma_closed_form() -> Outcome {
    let mut detail = Vec::new();
    let mut ok = true;
    for (n, l) in [(5usize, 3usize), (10, 7), (50, 20)] {
        let p = sigma_profile(&vec![Matrix::identity(n); l]).map_err(|e| e.to_string())?;
        let want = [(l as f64).sqrt(), 1.0, ((l * n) as f64).sqrt(), 1.0, ((l * n) as f64).sqrt()];
        let got = [p.sigma1, p.sigma2, p.sigma2_prime, p.sigma3, p.sigma1_prime];
        ok &= got == want;
        detail.push(format!("(n={n}, L={l}): {got:?}"));
    }
    check(ok, detail.join("; "))
}

fn bernstein_moments() -> Outcome {
    let mut ok = true;
    let mut detail = Vec::new();
    for p in [0.01, 0.1, 0.3, 0.5] {
        let params = bernoulli_bernstein(p).map_err(|e| e.to_string())?.squared;
        assert_eq!((params.v, params.r), (2.0 * p, 1.0));
        let c = verify_bernstein(|k| centered_bernoulli_abs_moment(p, 2 * k), params, 20).map_err(|e| e.to_string())?;
        ok &= c.passed;
        detail.push(format!("p={p}: {}", if c.passed { "ok".into() } else { format!("{:?}", c.first_violation) }));
    }
    check(ok, detail.join(", "))
}

fn counting_band() -> Outcome {
    let rho = 0.04;
    let mut worst = [0.0f64; 4];
    for s in 0..500u64 {
        let seed = substream(DEFAULT_SEED, &[9, s]);
        let spec = presets::fig2demo(rho, substream(seed, &[1])).map_err(|e| e.to_string())?;
        let stats = counting_checks(&sample(&spec, substream(seed, &[0])), rho).map_err(|e| e.to_string())?;
        for (w, r) in worst.iter_mut().zip(stats.ratios()) {
            *w = w.max(r);
        }
    }
    check(
        worst.iter().all(|&w| w < 20.0),
        format!(
            "worst ratio to scale: layer degree {:.3}, total degree {:.3}, degree sum {:.3}, sos norm {:.3}",
            worst[0], worst[1], worst[2], worst[3]
        ),
    )
}

fn linalg_kernel() -> Outcome {
    let mut rng = SplitMix64::new(substream(DEFAULT_SEED, &[10]));
    let (mut residual, mut ortho, mut trace): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for _ in 0..1000 {
        let n = 1 + rng.below(50) as usize;
        let m = SymMatrix::new(symmetric_matrix(n, &mut rng)).unwrap();
        let e = sym_eigen(&m).map_err(|e| e.to_string())?;
        let v = &e.vectors;
        let mv = m.as_matrix().matmul(v).unwrap();
        let scale = 1.0 + m.as_matrix().frobenius_norm();
        let mut r: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                r = r.max((mv[(i, j)] - v[(i, j)] * e.values[j]).abs());
            }
        }
        residual = residual.max(r / scale);
        let vtv = v.transpose().matmul(v).unwrap();
        ortho = ortho.max(vtv.max_abs_diff(&Matrix::identity(n)).unwrap());
        let tr = m.trace();
        trace = trace.max((e.values.iter().sum::<f64>() - tr).abs() / tr.abs().max(1.0));
    }

    let mut dilation: f64 = 0.0;
    for _ in 0..200 {
        let (rows, cols) = (1 + rng.below(12) as usize, 1 + rng.below(12) as usize);
        let a = gaussian_matrix(rows, cols, &mut rng);
        let direct = operator_norm(&a).map_err(|e| e.to_string())?;
        let dil = symmetric_dilation(&a).map_err(|e| e.to_string())?;
        let via_dilation = sym_eigen(&dil).map_err(|e| e.to_string())?.values[0];
        let via_gram = sym_eigen(&a.gram_cols()).map_err(|e| e.to_string())?.values[0].max(0.0).sqrt();
        dilation = dilation.max((direct - via_dilation).abs()).max((direct - via_gram).abs());
    }

    let mut gram_exact = true;
    for s in 0..20u64 {
        let g = sample(&presets::fig2demo(0.2, s).unwrap(), substream(DEFAULT_SEED, &[10, s]));
        gram_exact &= matricize(&g).gram_rows() == sum_of_squares(&g);
    }

    check(
        residual <= 1e-9 && ortho <= 1e-10 && trace <= 1e-8 && dilation <= 1e-10 && gram_exact,
        format!(
            "residual/(1+|M|_F) {residual:.2e}, |VtV-I| {ortho:.2e}, trace {trace:.2e}, dilation {dilation:.2e}, gram exact {gram_exact}"
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        (1, "two-community error curves", fig2_ordering),
        (2, "three-community error curves", fig3_curves),
        (3, "population eigengap growth", population_gap),
        (4, "S1 operator norm scaling in L", s1_scaling),
        (5, "quadratic split exactness", split_exactness),
        (6, "agreement with exhaustive least squares", oracle_agreement),
        (7, "sigma profile of identities", sigma_closed_form),
        (8, "Bernstein moments of squared noise", bernstein_moments),
        (9, "counting band", counting_band),
        (10, "linear algebra kernel", linalg_kernel),
    ];
    let selected: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for (id, name, run) in criteria {
        if !selected.is_empty() && !selected.contains(&id) {
            continue;
        }
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(d) => println!("PASS {id:>2} {name} [{secs:.1}s]: {d}"),
            Err(d) => {
                failed += 1;
                println!("FAIL {id:>2} {name} [{secs:.1}s]: {d}");
            }
        }
        match id {
            2 => println!("INFO  2 {}", fig3_signed_order()),
            6 => match oracle_agreement_with(EigenOrder::Signed) {
                Ok(a) => println!("INFO  6 signed order: {a}/50 seeds agree"),
                Err(e) => println!("INFO  6 signed order: {e}"),
            },
            _ => {}
        }
    }
    let strict = std::env::var("MLSBM_ACCEPTANCE_STRICT").is_ok_and(|v| v == "1");
    println!("acceptance: {failed} failed{}", if strict { " (strict)" } else { "" });
    if strict && failed > 0 {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
