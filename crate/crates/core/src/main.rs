use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use symest::pipeline::{self, Estimate, RunConfig};
use symest::Result;

/// Estimate the parameter and initial condition of the quadratic map from
/// a censored symbol sequence.
#[derive(Debug, Parser)]
#[command(name = "symest", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Flat `key = value` configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Master seed; overrides the configuration file.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Output directory; overrides the configuration file.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Grid worker threads (0 = all cores); overrides the configuration file.
    #[arg(long, global = true)]
    workers: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write the symbol sequence of the configured orbit.
    Simulate,
    /// Zoom over the parameter grid and refine the candidate orbit.
    Estimate,
    /// Run the polishing chain from the estimate in the output directory.
    Polish,
    /// Simulate, estimate, polish and report.
    Full,
    /// Print and rewrite the report from the files in the output directory.
    Report,
}

fn load_config(cli: &Cli) -> Result<RunConfig> {
    let mut config = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    if let Some(out) = &cli.out {
        config.output_dir = out.clone();
    }
    if let Some(workers) = cli.workers {
        config.workers = workers;
    }
    config.validate()?;
    Ok(config)
}

fn run(cli: &Cli) -> Result<()> {
    let config = load_config(cli)?;
    let dir = &config.output_dir;
    match cli.command {
        Command::Simulate => {
            let data = pipeline::cmd_simulate(&config)?;
            println!("wrote {} symbols to {}", data.bits().len(), dir.display());
        }
        Command::Estimate => {
            let data = pipeline::load_bits(dir)?;
            let run = pipeline::cmd_estimate(&config, &data)?;
            print!("{}", run.zoom.summary());
            println!("anchor = {}", run.estimate.anchor);
        }
        Command::Polish => {
            let data = pipeline::load_bits(dir)?;
            let estimate = Estimate::load(dir)?;
            let run = pipeline::cmd_polish(&config, &data, &estimate)?;
            println!("theta_hat = {:.10}", run.estimate.theta_hat);
            println!("y0_hat = {:.10}", run.estimate.y0_hat);
        }
        Command::Full => {
            let report = pipeline::cmd_full(&config)?;
            print!("{}", report.text);
        }
        Command::Report => {
            print!("{}", pipeline::cmd_report(&config)?);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
