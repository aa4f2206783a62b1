//! Figure reproductions: error curves, spectra and eigengaps, and
//! per-community degree spreads, each written as CSV plus an SVG chart.

use std::fs;
use std::path::{Path, PathBuf};

use mlsbm_core::aggregate::{bias_adjusted_sos, population_sos_with_bias, sum_of_squares};
use mlsbm_core::concentration::quantile_sorted;
use mlsbm_core::linalg::sym_eigenvalues;
use mlsbm_core::rng::substream;
use mlsbm_core::sbm::sample;

use crate::config::{ExperimentConfig, Preset, DEFAULT_SEED};
use crate::error::{Error, Result};
use crate::experiment::{records_to_csv, run_experiment, summarize, write_summary, SummaryRow};
use crate::plot::{line_chart, Series};

/// Density of the single-seed spectrum.
pub const FIG4_RHO: f64 = 0.15;
/// Densities compared for degree concentration.
pub const FIG5_RHOS: [f64; 2] = [0.025, 0.2];
pub const HISTOGRAM_BINS: usize = 40;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct FigureOptions {
    pub trials: Option<usize>,
    pub seed: Option<u64>,
}

/// Files written by one figure.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FigureOutput {
    pub files: Vec<PathBuf>,
    pub summary: Vec<SummaryRow>,
}

fn write(dir: &Path, name: &str, contents: &str, out: &mut FigureOutput) -> Result<()> {
    let path = dir.join(name);
    fs::write(&path, contents).map_err(Error::io(&path))?;
    out.files.push(path);
    Ok(())
}

fn csv_text(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("memory");
    for r in rows {
        w.write_record(&r).expect("memory");
    }
    String::from_utf8(w.into_inner().expect("memory")).expect("ASCII")
}

pub fn run_figure(name: Preset, out_dir: &Path, opts: FigureOptions) -> Result<FigureOutput> {
    fs::create_dir_all(out_dir).map_err(Error::io(out_dir))?;
    match name {
        Preset::Fig2demo | Preset::Fig3 | Preset::Fig6weighted => error_curves(name, out_dir, opts),
        Preset::Fig4 => spectra(out_dir, opts),
        Preset::Fig5 => degree_spread(out_dir, opts),
    }
}

fn error_curves(name: Preset, dir: &Path, opts: FigureOptions) -> Result<FigureOutput> {
    let mut config = ExperimentConfig::preset(name);
    config.trials = opts.trials.unwrap_or(config.trials);
    config.base_seed = opts.seed.unwrap_or(config.base_seed);
    let records = run_experiment(&config)?;
    let summary = summarize(&records);
    let mut out = FigureOutput::default();
    write(dir, &format!("{name}.csv"), &records_to_csv(&records), &mut out)?;
    let mut buf = Vec::new();
    write_summary(&mut buf, &summary).map_err(Error::csv(dir.join(format!("{name}_summary.csv"))))?;
    write(dir, &format!("{name}_summary.csv"), &String::from_utf8(buf).expect("ASCII"), &mut out)?;
    let series: Vec<Series> = config
        .methods
        .iter()
        .map(|&m| Series {
            name: m.name().to_string(),
            points: summary.iter().filter(|s| s.method == m).map(|s| (s.rho, s.mean_rate)).collect(),
        })
        .collect();
    write(dir, &format!("{name}.svg"), &line_chart(&series, "rho", "mean misclustering rate")?, &mut out)?;
    out.summary = summary;
    Ok(out)
}

/// Equal-width histogram over `[min, max]`: `(lower, upper, count)` per bin.
pub fn histogram(values: &[f64], bins: usize) -> Vec<(f64, f64, usize)> {
    if values.is_empty() || bins == 0 {
        return Vec::new();
    }
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let width = if hi > lo { (hi - lo) / bins as f64 } else { 1.0 };
    let mut counts = vec![0usize; bins];
    for &v in values {
        let b = (((v - lo) / width) as usize).min(bins - 1);
        counts[b] += 1;
    }
    counts.into_iter().enumerate().map(|(b, c)| (lo + b as f64 * width, lo + (b + 1) as f64 * width, c)).collect()
}

/// Population eigengap of the sum-of-squares expectation at `K = 3`, in
/// both normalizations, over the model's grid.
pub fn population_gap_curve(config: &ExperimentConfig) -> Result<Vec<(f64, f64, Option<f64>)>> {
    config
        .rho_grid
        .iter()
        .map(|&rho| {
            let gap = population_sos_with_bias(&config.model(rho, 0)?)?.gap(config.k())?;
            Ok((rho, gap.over_kth, gap.over_next))
        })
        .collect()
}

fn spectra(dir: &Path, opts: FigureOptions) -> Result<FigureOutput> {
    let config = ExperimentConfig::preset(Preset::Fig4);
    let seed = opts.seed.unwrap_or(DEFAULT_SEED);
    let g = sample(&config.model(FIG4_RHO, 0)?, substream(seed, &[0]));
    let raw = sym_eigenvalues(&sum_of_squares(&g))?;
    let adjusted = sym_eigenvalues(&bias_adjusted_sos(&g))?;
    let mut out = FigureOutput::default();

    let kinds = [("sos", &raw), ("sos_debias", &adjusted)];
    let eig_rows = kinds.iter().flat_map(|(kind, vals)| {
        vals.iter().enumerate().map(move |(i, v)| vec![kind.to_string(), i.to_string(), v.to_string()])
    });
    write(dir, "fig4_eigenvalues.csv", &csv_text(&["matrix", "index", "value"], eig_rows), &mut out)?;
    let hist_rows = kinds.iter().flat_map(|(kind, vals)| {
        histogram(vals, HISTOGRAM_BINS).into_iter().enumerate().map(move |(b, (lo, hi, c))| {
            vec![kind.to_string(), b.to_string(), lo.to_string(), hi.to_string(), c.to_string()]
        })
    });
    write(dir, "fig4_histogram.csv", &csv_text(&["matrix", "bin", "lower", "upper", "count"], hist_rows), &mut out)?;

    let grid_config = ExperimentConfig::preset(Preset::Fig3);
    let curve = population_gap_curve(&grid_config)?;
    let mut rows = Vec::new();
    for &(rho, a, b) in &curve {
        rows.push(vec![rho.to_string(), "over_kth".into(), a.to_string()]);
        if let Some(b) = b {
            rows.push(vec![rho.to_string(), "over_next".into(), b.to_string()]);
        }
    }
    let gap_csv = csv_text(&["rho", "normalization", "gap"], rows);
    write(dir, "fig4_gap.csv", &gap_csv, &mut out)?;
    let series = vec![
        Series { name: "(l3-l4)/l3".into(), points: curve.iter().map(|&(r, a, _)| (r, a)).collect() },
        Series { name: "(l3-l4)/l4".into(), points: curve.iter().filter_map(|&(r, _, b)| b.map(|b| (r, b))).collect() },
    ];
    write(dir, "fig4_gap.svg", &line_chart(&series, "rho", "population eigengap")?, &mut out)?;
    Ok(out)
}

/// First, second and third quartiles of a degree sample.
pub fn quartiles(values: &[usize]) -> (f64, f64, f64) {
    let mut v: Vec<f64> = values.iter().map(|&d| d as f64).collect();
    v.sort_by(f64::total_cmp);
    (quantile_sorted(&v, 0.25), quantile_sorted(&v, 0.5), quantile_sorted(&v, 0.75))
}

/// Quartiles of first-layer degrees within one community.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DegreeSpread {
    pub rho: f64,
    /// 1-based.
    pub community: usize,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
}

impl DegreeSpread {
    pub fn iqr_over_median(&self) -> f64 {
        (self.q3 - self.q1) / self.median
    }
}

/// Raw `(ρ, community, node, degree)` rows and per-community spreads.
pub fn degree_spread_table(seed: u64) -> Result<(Vec<Vec<String>>, Vec<DegreeSpread>)> {
    let config = ExperimentConfig::preset(Preset::Fig5);
    let mut raw = Vec::new();
    let mut table = Vec::new();
    for (i, &rho) in FIG5_RHOS.iter().enumerate() {
        let spec = config.model(rho, 0)?;
        let g = sample(&spec, substream(seed, &[i as u64]));
        let degrees = g.layer(0).degrees();
        for c in 0..spec.k() {
            let members = spec.theta().members(c);
            for &v in &members {
                raw.push(vec![rho.to_string(), (c + 1).to_string(), v.to_string(), degrees[v].to_string()]);
            }
            let ds: Vec<usize> = members.iter().map(|&v| degrees[v]).collect();
            let (q1, median, q3) = quartiles(&ds);
            table.push(DegreeSpread { rho, community: c + 1, q1, median, q3 });
        }
    }
    Ok((raw, table))
}

fn degree_spread(dir: &Path, opts: FigureOptions) -> Result<FigureOutput> {
    let (raw, table) = degree_spread_table(opts.seed.unwrap_or(DEFAULT_SEED))?;
    let mut out = FigureOutput::default();
    write(dir, "fig5_degrees.csv", &csv_text(&["rho", "community", "node", "degree"], raw), &mut out)?;
    let rows = table.iter().map(|d| {
        vec![
            d.rho.to_string(),
            d.community.to_string(),
            d.q1.to_string(),
            d.median.to_string(),
            d.q3.to_string(),
            d.iqr_over_median().to_string(),
        ]
    });
    write(
        dir,
        "fig5_summary.csv",
        &csv_text(&["rho", "community", "q1", "median", "q3", "iqr_over_median"], rows),
        &mut out,
    )?;
    let series: Vec<Series> = (1..=3)
        .map(|c| Series {
            name: format!("community {c}"),
            points: table.iter().filter(|d| d.community == c).map(|d| (d.rho, d.iqr_over_median())).collect(),
        })
        .collect();
    write(dir, "fig5.svg", &line_chart(&series, "rho", "degree IQR / median")?, &mut out)?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn histogram_counts() {
        let h = histogram(&[0.0, 1.0, 2.0, 3.0, 4.0], 2);
        assert_eq!(h, vec![(0.0, 2.0, 2), (2.0, 4.0, 3)]);
        assert_eq!(histogram(&[5.0, 5.0], 3).iter().map(|b| b.2).sum::<usize>(), 2);
        assert!(histogram(&[], 3).is_empty());
    }

    #[test]
    fn quartile_examples() {
        assert_eq!(quartiles(&[1, 2, 3, 4, 5]), (2.0, 3.0, 4.0));
    }

    #[test]
    fn gap_rises_with_density() {
        let curve = population_gap_curve(&ExperimentConfig::preset(Preset::Fig3)).unwrap();
        let (first, last) = (curve[0], curve[curve.len() - 1]);
        assert_eq!((first.0, last.0), (0.025, 0.2));
        assert!(last.1 > first.1);
    }

    #[test]
    fn degrees_concentrate_at_higher_density() {
        let (_, table) = degree_spread_table(3).unwrap();
        for c in 1..=3 {
            let spread = |rho: f64| table.iter().find(|d| d.rho == rho && d.community == c).unwrap().iqr_over_median();
            assert!(spread(0.2) < spread(0.025), "community {c}");
        }
    }
}
