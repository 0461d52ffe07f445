//! `snrforge`: schedule inspection, validation, training, sampling and
//! comparison from the command line.
//!
//! Exit codes: 0 success, 1 validation threshold failed, 2 bad input,
//! 3 training or sampling diverged. Tables and reports go to stdout or
//! `--out` paths; diagnostics go to stderr.

mod commands;
mod config;

use clap::{Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Debug)]
pub enum CliError {
    Input(String),
    Threshold(String),
    Divergence(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Threshold(_) => 1,
            CliError::Input(_) => 2,
            CliError::Divergence(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Input(m) | CliError::Threshold(m) | CliError::Divergence(m) => f.write_str(m),
        }
    }
}

impl From<snrforge::Error> for CliError {
    fn from(e: snrforge::Error) -> Self {
        match e {
            snrforge::Error::TrainingDivergence { .. } | snrforge::Error::SamplingDivergence { .. } => {
                CliError::Divergence(e.to_string())
            }
            other => CliError::Input(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Input(format!("i/o: {e}"))
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Input(format!("json: {e}"))
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Preset {
    /// Laplace(μ = 0, b = 0.5)
    LaplaceBest,
    /// Cauchy(μ = 0, γ = 0.5)
    CauchyBest,
    /// CosineScaled(s = 2)
    CosineScaledBest,
}

#[derive(Debug, clap::Args)]
#[group(required = true, multiple = false)]
pub struct SpecArg {
    /// Schedule as a JSON object, or a path to a file holding one.
    #[arg(long)]
    spec: Option<String>,
    #[arg(long, value_enum)]
    preset: Option<Preset>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum PointFormat {
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "snrforge", version, about = "Noise schedules as log-SNR densities, with a 2D diffusion lab")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Tabulate lambda,pdf,survival,alpha,sigma on a uniform λ grid.
    SchedulePlot {
        #[command(flatten)]
        spec: SpecArg,
        /// Defaults to the schedule's lower clamp.
        #[arg(long, allow_hyphen_values = true)]
        lambda_min: Option<f64>,
        /// Defaults to the schedule's upper clamp.
        #[arg(long, allow_hyphen_values = true)]
        lambda_max: Option<f64>,
        #[arg(long, default_value_t = 201)]
        points: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check density, survival and inverse against each other.
    Validate {
        #[command(flatten)]
        spec: SpecArg,
        #[arg(long, default_value_t = 10_000)]
        grid: usize,
    },
    /// Dump Monte-Carlo draws t ~ U[0,1), λ = λ(t) as t,lambda.
    SampleLambda {
        #[command(flatten)]
        spec: SpecArg,
        #[arg(long, default_value_t = 10_000)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Train from a JSON run config; writes a checkpoint and a loss trace.
    Train {
        #[arg(long)]
        config: PathBuf,
        /// Checkpoint blob; the sidecar goes to `<path>.json`.
        #[arg(long)]
        checkpoint: PathBuf,
        /// Loss trace CSV (step,loss,lambda_mean).
        #[arg(long)]
        trace: PathBuf,
    },
    /// DDIM samples from a checkpoint along a log-SNR aligned plan.
    Sample {
        #[arg(long)]
        checkpoint: PathBuf,
        /// Schedule to sample with; must match the checkpoint unless
        /// `--override-schedule` is given.
        #[arg(long)]
        schedule: Option<String>,
        #[arg(long)]
        override_schedule: bool,
        #[arg(long, default_value_t = 50)]
        steps: usize,
        #[arg(long, default_value_t = snrforge::sampler::DEFAULT_T_MAX)]
        t_max: f64,
        #[arg(long, default_value_t = 1000)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = PointFormat::Csv)]
        format: PointFormat,
        /// Audit table i,t,lambda,t_prime,alpha,sigma.
        #[arg(long)]
        plan_out: Option<PathBuf>,
    },
    /// Train several configs under common random numbers and compare them.
    Compare {
        /// JSON array of run configs.
        #[arg(long)]
        configs: PathBuf,
        /// Long-format CSV.
        #[arg(long)]
        out: PathBuf,
        /// Summary JSON with final metrics and the best config per target.
        #[arg(long)]
        summary: PathBuf,
    },
}

fn set_threads() -> Result<(), CliError> {
    if let Ok(v) = std::env::var("SNRFORGE_THREADS") {
        let n: usize = v
            .parse()
            .ok()
            .filter(|&n| n >= 1)
            .ok_or_else(|| CliError::Input(format!("SNRFORGE_THREADS = `{v}` is not a positive integer")))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Input(format!("thread pool: {e}")))?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    set_threads()?;
    match cli.command {
        Command::SchedulePlot { spec, lambda_min, lambda_max, points, out } => {
            commands::schedule_plot(&spec, lambda_min, lambda_max, points, out.as_deref())
        }
        Command::Validate { spec, grid } => commands::validate(&spec, grid),
        Command::SampleLambda { spec, n, seed, out } => commands::sample_lambda(&spec, n, seed, out.as_deref()),
        Command::Train { config, checkpoint, trace } => commands::train(&config, &checkpoint, &trace),
        Command::Sample { checkpoint, schedule, override_schedule, steps, t_max, n, seed, out, format, plan_out } => {
            commands::sample(commands::SampleArgs {
                checkpoint: &checkpoint,
                schedule: schedule.as_deref(),
                override_schedule,
                steps,
                t_max,
                n,
                seed,
                out: &out,
                format,
                plan_out: plan_out.as_deref(),
            })
        }
        Command::Compare { configs, out, summary } => commands::compare(&configs, &out, &summary),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
