use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use mlsbm::config::{parse_mc_config, ExperimentConfig, Preset};
use mlsbm::experiment::{records_to_csv, run_experiment, run_mc, summarize, write_mc_samples};
use mlsbm::figures::{run_figure, FigureOptions};
use mlsbm::network::{read_expression, run_pipeline, write_pipeline, PipelineOptions};
use mlsbm::plot::{plot_csv_file, PlotSpec};
use mlsbm::{Error, Result};

/// Multi-layer stochastic block model experiments.
#[derive(Debug, Parser)]
#[command(name = "mlsbm", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a config-driven sweep and write one CSV row per (rho, trial, method).
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Reproduce a figure preset as CSV plus SVG.
    Figure {
        /// fig2demo, fig3, fig4, fig5 or fig6weighted.
        name: Preset,
        #[arg(long)]
        out_dir: PathBuf,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Monte-Carlo operator-norm study; prints quantiles and log-log slopes.
    Concentration {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Expression tables to a thresholded, degree-filtered network.
    Pipeline {
        /// One delimited expression file per layer, samples as rows.
        #[arg(long, num_args = 1.., required = true)]
        layers: Vec<PathBuf>,
        #[arg(long, default_value_t = mlsbm::core::pipeline::DEFAULT_TAU)]
        tau: f64,
        #[arg(long, default_value_t = mlsbm::core::pipeline::DEFAULT_MIN_TOTAL_DEGREE)]
        min_degree: usize,
        #[arg(long)]
        out_dir: PathBuf,
        /// Also estimate this many communities on the filtered network.
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Line chart of two CSV columns, one polyline per series value.
    Plot {
        #[arg(long)]
        csv: PathBuf,
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
        #[arg(long)]
        series: Option<String>,
        #[arg(long)]
        out: PathBuf,
    },
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|source| Error::Io { path: path.to_path_buf(), source })
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Simulate { config, out } => {
            let cfg = ExperimentConfig::parse(&read_text(&config)?)?;
            let records = run_experiment(&cfg)?;
            write_text(&out, &records_to_csv(&records))?;
            for s in summarize(&records) {
                println!("rho={} method={} trials={} mean_rate={:.4}", s.rho, s.method.name(), s.trials, s.mean_rate);
            }
        }
        Command::Figure { name, out_dir, trials, seed } => {
            let out = run_figure(name, &out_dir, FigureOptions { trials, seed })?;
            for f in &out.files {
                println!("wrote {}", f.display());
            }
        }
        Command::Concentration { config, out } => {
            let cfg = parse_mc_config(&read_text(&config)?)?;
            let study = run_mc(&cfg)?;
            let mut buf = Vec::new();
            write_mc_samples(&mut buf, &study.samples).map_err(|source| Error::Csv { path: out.clone(), source })?;
            fs::write(&out, buf).map_err(|source| Error::Io { path: out.clone(), source })?;
            for p in &study.points {
                println!("L={} rho={} q10={:.4} median={:.4} q90={:.4}", p.l, p.rho, p.q10, p.median, p.q90);
            }
            for (rho, slope) in &study.slopes {
                match slope {
                    Some(s) => println!("rho={rho} slope={s:.4}"),
                    None => println!("rho={rho} slope=NA"),
                }
            }
        }
        Command::Pipeline { layers, tau, min_degree, out_dir, k, seed } => {
            let tables = layers.iter().map(|p| read_expression(p)).collect::<Result<Vec<_>>>()?;
            let opts =
                PipelineOptions { tau, min_total_degree: min_degree, communities: k, seed, ..Default::default() };
            let out = run_pipeline(&tables, &opts)?;
            write_pipeline(&out, &out_dir)?;
            println!("kept {} of {} genes", out.kept.len(), tables[0].num_genes());
            for d in &out.diagnostics {
                println!(
                    "layer {}: edges={} components={} max_degree={} median_degree={}",
                    d.layer, d.edges, d.components, d.max_degree, d.median_degree
                );
            }
        }
        Command::Plot { csv, x, y, series, out } => plot_csv_file(&csv, &PlotSpec { x, y, series }, &out)?,
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
