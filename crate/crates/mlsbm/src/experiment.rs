//! Grid sweeps: one graph per `(ρ, trial)` cell shared by every method,
//! evaluated concurrently and reported in `(ρ index, trial, method)` order.

use std::io::{Read, Write};
use std::path::Path;

use mlsbm_core::cluster::{misclustering, Estimator, Method};
use mlsbm_core::concentration::{mc_sample, summarize_mc, McConfig, McSample, McStudy};
use mlsbm_core::rng::substream;
use mlsbm_core::sbm::sample;
use rayon::prelude::*;

use crate::config::ExperimentConfig;
use crate::error::{bail, Error, Result};

pub const RECORD_HEADER: [&str; 10] =
    ["rho", "L", "n", "K", "method", "weighted", "trial", "seed", "misclustered", "rate"];
pub const MC_HEADER: [&str; 7] = ["statistic", "n", "L", "rho", "rep", "seed", "value"];

/// One method's outcome on one sampled graph.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRecord {
    pub rho: f64,
    pub l: usize,
    pub n: usize,
    pub k: usize,
    pub method: Method,
    pub weighted: bool,
    pub trial: usize,
    /// Cell seed; the graph, the layer assignment and k-means all derive
    /// from it.
    pub seed: u64,
    pub misclustered: usize,
    /// `misclustered / n`.
    pub rate: f64,
}

/// Seed of cell `(rho_idx, trial)`.
pub fn cell_seed(base: u64, rho_idx: usize, trial: usize) -> u64 {
    substream(base, &[trial as u64, rho_idx as u64])
}

/// Runs every configured method on the graph of one cell. Depends only on
/// `rho` and `seed`, so any stored record can be recomputed from its row.
pub fn run_cell(config: &ExperimentConfig, rho: f64, trial: usize, seed: u64) -> Result<Vec<ResultRecord>> {
    let spec = config.model(rho, substream(seed, &[1]))?;
    let g = sample(&spec, substream(seed, &[0]));
    let kmeans_seed = substream(seed, &[2]);
    config
        .methods
        .iter()
        .map(|&method| {
            let est = Estimator::new(config.k(), method)
                .weighted(config.weighted)
                .restarts(config.restarts)
                .order(config.order)
                .estimate(&g, kmeans_seed)?;
            let m = misclustering(&est, spec.theta())?;
            Ok(ResultRecord {
                rho,
                l: config.layers,
                n: config.n(),
                k: config.k(),
                method,
                weighted: config.weighted,
                trial,
                seed,
                misclustered: m.count,
                rate: m.rate,
            })
        })
        .collect()
}

pub fn run_experiment(config: &ExperimentConfig) -> Result<Vec<ResultRecord>> {
    config.validate()?;
    let cells: Vec<(usize, usize)> =
        (0..config.rho_grid.len()).flat_map(|r| (0..config.trials).map(move |t| (r, t))).collect();
    let per_cell: Vec<Vec<ResultRecord>> = cells
        .par_iter()
        .map(|&(r, t)| run_cell(config, config.rho_grid[r], t, cell_seed(config.base_seed, r, t)))
        .collect::<Result<_>>()?;
    Ok(per_cell.into_iter().flatten().collect())
}

pub fn write_records(w: impl Write, records: &[ResultRecord]) -> csv::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(RECORD_HEADER)?;
    for r in records {
        out.write_record([
            r.rho.to_string(),
            r.l.to_string(),
            r.n.to_string(),
            r.k.to_string(),
            r.method.name().to_string(),
            r.weighted.to_string(),
            r.trial.to_string(),
            r.seed.to_string(),
            r.misclustered.to_string(),
            r.rate.to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

pub fn records_to_csv(records: &[ResultRecord]) -> String {
    let mut buf = Vec::new();
    write_records(&mut buf, records).expect("writing to memory");
    String::from_utf8(buf).expect("ASCII")
}

fn field<T: std::str::FromStr>(row: &csv::StringRecord, i: usize, line: usize) -> Result<T> {
    let raw = row.get(i).unwrap_or("");
    match raw.parse() {
        Ok(v) => Ok(v),
        Err(_) => bail!("line {line}: cannot parse `{}` value `{raw}`", RECORD_HEADER[i]),
    }
}

pub fn read_records(r: impl Read) -> Result<Vec<ResultRecord>> {
    let mut rdr = csv::Reader::from_reader(r);
    let header = rdr.headers().map_err(Error::csv("<records>"))?.clone();
    if header.iter().ne(RECORD_HEADER) {
        bail!("unexpected header `{}`", header.iter().collect::<Vec<_>>().join(","));
    }
    let mut out = Vec::new();
    for (i, row) in rdr.records().enumerate() {
        let row = row.map_err(Error::csv("<records>"))?;
        let line = i + 2;
        let method: String = field(&row, 4, line)?;
        out.push(ResultRecord {
            rho: field(&row, 0, line)?,
            l: field(&row, 1, line)?,
            n: field(&row, 2, line)?,
            k: field(&row, 3, line)?,
            method: method.parse().map_err(Error::invalid(format!("line {line}")))?,
            weighted: field(&row, 5, line)?,
            trial: field(&row, 6, line)?,
            seed: field(&row, 7, line)?,
            misclustered: field(&row, 8, line)?,
            rate: field(&row, 9, line)?,
        });
    }
    Ok(out)
}

pub fn read_records_file(path: &Path) -> Result<Vec<ResultRecord>> {
    let f = std::fs::File::open(path).map_err(Error::io(path))?;
    read_records(f)
}

/// Mean misclustering rate of one method at one `ρ`.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub rho: f64,
    pub method: Method,
    pub weighted: bool,
    pub trials: usize,
    pub mean_rate: f64,
}

/// Averages over trials; rows follow the first appearance of each
/// `(ρ, method, weighted)`.
pub fn summarize(records: &[ResultRecord]) -> Vec<SummaryRow> {
    let mut rows: Vec<(SummaryRow, f64)> = Vec::new();
    for r in records {
        let key = |s: &SummaryRow| s.rho == r.rho && s.method == r.method && s.weighted == r.weighted;
        match rows.iter_mut().find(|(s, _)| key(s)) {
            Some((s, sum)) => {
                s.trials += 1;
                *sum += r.rate;
            }
            None => rows.push((
                SummaryRow { rho: r.rho, method: r.method, weighted: r.weighted, trials: 1, mean_rate: 0.0 },
                r.rate,
            )),
        }
    }
    rows.into_iter()
        .map(|(mut s, sum)| {
            s.mean_rate = sum / s.trials as f64;
            s
        })
        .collect()
}

/// Mean rate of `method` at the grid point closest to `rho`.
pub fn mean_rate(summary: &[SummaryRow], rho: f64, method: Method) -> Option<f64> {
    summary.iter().filter(|s| s.method == method && (s.rho - rho).abs() < 1e-9).map(|s| s.mean_rate).next()
}

pub fn write_summary(w: impl Write, rows: &[SummaryRow]) -> csv::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["rho", "method", "weighted", "trials", "mean_rate"])?;
    for s in rows {
        out.write_record([
            s.rho.to_string(),
            s.method.name().to_string(),
            s.weighted.to_string(),
            s.trials.to_string(),
            s.mean_rate.to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

/// [`mlsbm_core::concentration::mc_opnorm_study`] with replicates spread
/// over threads; samples keep the sequential order.
pub fn run_mc(config: &McConfig) -> Result<McStudy> {
    config.validate().map_err(Error::invalid("concentration config"))?;
    let cells: Vec<_> = config.cells().collect();
    let samples: Vec<McSample> =
        cells.par_iter().map(|&(l, r, rep)| mc_sample(config, l, r, rep)).collect::<std::result::Result<_, _>>()?;
    Ok(summarize_mc(config, samples))
}

pub fn write_mc_samples(w: impl Write, samples: &[McSample]) -> csv::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(MC_HEADER)?;
    for s in samples {
        out.write_record([
            s.statistic.name().to_string(),
            s.n.to_string(),
            s.l.to_string(),
            s.rho.to_string(),
            s.rep.to_string(),
            s.seed.to_string(),
            s.value.to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}
