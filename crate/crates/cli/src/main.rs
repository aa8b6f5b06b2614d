use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use mvflow_cli::{config::Experiment, experiments, CliError, ExperimentConfig};

/// Finite-volume laboratory for gas and granular flow on the periodic
/// unit square.
#[derive(Parser)]
#[command(name = "mvflow", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one simulation and export energy/momentum diagnostics
    Simulate(RunArgs),
    /// Check granular momentum decay against its closed-form majorant
    Deposition(RunArgs),
    /// Compare the scheme with a strong reference across resolutions
    WeakStrong(RunArgs),
    /// Lift an ensemble of runs to measure fields and export moments
    YoungAnalyze(RunArgs),
    /// Verify that force-balanced granular states stay at rest
    StationaryCheck(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Config file; built-in defaults apply when omitted
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (overrides the config)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed for randomized ensembles (overrides the config)
    #[arg(long)]
    seed: Option<u64>,
    /// Print the effective config and exit without running
    #[arg(long)]
    print_config: bool,
}

fn load(args: &RunArgs, experiment: Experiment) -> Result<ExperimentConfig, CliError> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| {
                CliError::Config(format!("cannot read `{}`: {e}", path.display()))
            })?;
            ExperimentConfig::parse(&text, experiment)?
        }
        None => ExperimentConfig::default_for(experiment),
    };
    if let Some(out) = &args.out {
        cfg.output.dir = out.display().to_string();
    }
    if let Some(seed) = args.seed {
        cfg.output.seed = seed;
    }
    Ok(cfg)
}

fn dispatch(args: &RunArgs, experiment: Experiment) -> Result<bool, CliError> {
    let cfg = load(args, experiment)?;
    if args.print_config {
        print!("{}", cfg.to_text());
        return Ok(true);
    }
    let outcome = experiments::run(&cfg)?;
    print!("{}", outcome.summary_text());
    println!("outputs: {}", cfg.output.dir);
    Ok(outcome.passed)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (args, experiment) = match &cli.command {
        Command::Simulate(a) => (a, Experiment::Simulate),
        Command::Deposition(a) => (a, Experiment::Deposition),
        Command::WeakStrong(a) => (a, Experiment::WeakStrong),
        Command::YoungAnalyze(a) => (a, Experiment::YoungAnalyze),
        Command::StationaryCheck(a) => (a, Experiment::StationaryCheck),
    };
    match dispatch(args, experiment) {
        Ok(true) => ExitCode::from(0),
        Ok(false) => {
            eprintln!("one or more checks failed");
            ExitCode::from(1)
        }
        Err(e @ CliError::Config(_)) => {
            eprintln!("{e}");
            ExitCode::from(2)
        }
        Err(e @ CliError::Run(_)) => {
            eprintln!("{e}");
            ExitCode::from(1)
        }
    }
}
