//! Command-line experiment runner: estimation sweeps, single fits and the
//! covariance benchmark, written as plot-ready CSV plus a metadata file.

mod config;
mod output;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use config::{resolve, CommandKind, Overrides, RunConfig, RunPayload};
use shrinkreg::simulation::{covariance_benchmark, run_monte_carlo, ErrorTable};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "shrinkreg",
    version,
    about = "Robust low-rank trace regression experiments",
    after_help = "Presets: figure2/3/4-{lognormal,cauchy,gaussian} (compressed sensing, matrix \
                  completion, multi-task) and figure5-{gaussian,t3} (covariance benchmark)."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a robust-vs-standard Monte Carlo sweep and write error tables.
    Simulate(RunArgs),
    /// Fit a single replication at the first grid point of the experiment.
    Fit(RunArgs),
    /// Compare classical and l4-shrinkage covariance estimators.
    CovarianceBench(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// TOML experiment description; merged under any preset.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Named preset (see --help for the list).
    #[arg(long)]
    preset: Option<String>,
    /// Output directory for errors.csv, summary.csv and meta.txt.
    #[arg(long)]
    out: PathBuf,
    /// Base seed; replication seeds are seed + replication index.
    #[arg(long)]
    seed: Option<u64>,
    /// Replication count per grid point.
    #[arg(long)]
    reps: Option<u32>,
    /// Worker threads (0 = all cores).
    #[arg(long)]
    jobs: Option<usize>,
    /// Override the robust threshold-rate constant.
    #[arg(long = "tau-const")]
    tau_const: Option<f64>,
    /// Override the penalty-rate constant for both methods.
    #[arg(long = "lambda-const")]
    lambda_const: Option<f64>,
    /// Override the confidence parameter of the penalty rule.
    #[arg(long)]
    delta: Option<f64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (kind, args) = match &cli.command {
        Command::Simulate(args) => (CommandKind::Simulate, args),
        Command::Fit(args) => (CommandKind::Fit, args),
        Command::CovarianceBench(args) => (CommandKind::CovarianceBench, args),
    };
    match run(kind, args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(kind: CommandKind, args: &RunArgs) -> Result<()> {
    let overrides = Overrides {
        preset: args.preset.clone(),
        seed: args.seed,
        reps: args.reps,
        jobs: args.jobs,
        tau_const: args.tau_const,
        lambda_const: args.lambda_const,
        delta: args.delta,
    };
    let config = resolve(kind, args.config.as_deref(), &args.out, &overrides)?;
    let table = execute(&config)?;
    output::write_outputs(&config, &table, &config.out_dir)?;
    eprintln!(
        "wrote {} rows to {}",
        table.rows.len(),
        config.out_dir.join("errors.csv").display()
    );
    Ok(())
}

fn execute(config: &RunConfig) -> Result<ErrorTable> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.jobs)
        .build()
        .context("building worker pool")?;
    pool.install(|| match &config.payload {
        RunPayload::Estimation(exp) => {
            for point in &exp.grid {
                eprintln!(
                    "running d={} n={} x {} replications",
                    point.d, point.samples, exp.replications
                );
            }
            Ok(run_monte_carlo(exp)?)
        }
        RunPayload::Covariance(specs) => {
            let mut merged: Option<ErrorTable> = None;
            for spec in specs {
                eprintln!(
                    "running covariance benchmark d/n={} over n={:?} x {} replications",
                    spec.d_over_n, spec.n_grid, spec.replications
                );
                let table = covariance_benchmark(spec)?;
                merged = Some(match merged {
                    None => table,
                    Some(mut acc) => {
                        acc.rows.extend(table.rows);
                        acc
                    }
                });
            }
            let mut table = merged.context("no benchmark specs resolved")?;
            table.rows.sort_by(|a, b| {
                (a.d, a.samples, a.replication, a.method)
                    .cmp(&(b.d, b.samples, b.replication, b.method))
            });
            Ok(table)
        }
    })
}
