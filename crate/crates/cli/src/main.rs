//! `sykmix`: configuration-driven experiments on overlapping SYK models.

mod commands;
mod config;
mod error;
mod output;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::Config;
use error::{CliError, Result};
use output::{render, Format, Provenance};

#[derive(Debug, Parser)]
#[command(name = "sykmix", version, about = "Moments of overlapping SYK models and their mixed q-Gaussian limits")]
struct Cli {
    /// JSON experiment configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the config seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads; results do not depend on this.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Adds a wall-time column to `moments` (makes output run-dependent).
    #[arg(long, global = true)]
    timings: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum Command {
    /// Joint moments E[tr(H_{w1} ⋯ H_{wd})] by the requested methods.
    Moments,
    /// Finite-size estimates against the limit along a sweep.
    Converge,
    /// ε-freeness checks of the limiting Gaussian system over a graph.
    EpsilonCheck,
    /// Subset-intersection statistics.
    Stats,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Moments => "moments",
            Command::Converge => "converge",
            Command::EpsilonCheck => "epsilon-check",
            Command::Stats => "stats",
        }
    }
}

fn run(cli: &Cli) -> Result<()> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| CliError::Config("--config PATH is required".into()))?;
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let mut config = Config::from_json(&text)?;
    if cli.seed.is_some() {
        config.seed = cli.seed;
    }
    config.seed = Some(config.seed());
    if let Some(t) = cli.threads.or(config.threads) {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    }

    let table = match cli.command {
        Command::Moments => commands::moments(&config, cli.timings)?,
        Command::Converge => commands::converge(&config)?,
        Command::EpsilonCheck => commands::epsilon_check(&config)?,
        Command::Stats => commands::stats(&config)?,
    };
    let bytes = render(&table, &Provenance::new(cli.command.name(), &config)?, cli.format)?;
    match &cli.out {
        Some(p) => std::fs::write(p, bytes)?,
        None => std::io::stdout().lock().write_all(&bytes)?,
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("sykmix: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
