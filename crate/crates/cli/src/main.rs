//! `areasim`: urban area embeddings from mobility logs and their comparison
//! with venue-category profiles.

mod commands;
mod config;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use log::error;
use thiserror::Error;

use crate::config::{RunConfig, Settings};

#[derive(Debug, Parser)]
#[command(name = "areasim", version, about)]
struct Cli {
    /// TOML file of `key = value` settings; command-line flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(flatten)]
    settings: Settings,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum Command {
    /// Resolve zips, filter sparse zips and aggregate movements to zip level.
    Ingest,
    /// Write the per-period flow networks.
    BuildNet,
    /// Learn one embedding per period.
    Embed,
    /// Compare movement and category similarity per period.
    Compare,
    /// Correlate the embeddings of different periods.
    CrossPeriod,
    /// Generate a synthetic city.
    Synth,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{context}: {source}")]
    Core {
        context: String,
        source: areasim_core::Error,
    },
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    pub fn core(context: impl Into<String>, source: areasim_core::Error) -> Self {
        CliError::Core {
            context: context.into(),
            source,
        }
    }

    /// 2 for usage and I/O problems, 1 for analysis failures.
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Io { .. } => 2,
            CliError::Core { source, .. } if source.is_input_error() => 2,
            CliError::Core { .. } => 1,
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let file = match &cli.config {
        Some(path) => Settings::load_file(path)?,
        None => Settings::default(),
    };
    let settings = cli.settings.over(file);
    let cfg = RunConfig::resolve(&settings)?;
    let out = settings
        .out
        .clone()
        .ok_or_else(|| CliError::Usage("--out <dir> is required".into()))?;
    std::fs::create_dir_all(&out).map_err(|e| CliError::io(&out, e))?;
    match cli.command {
        Command::Ingest => commands::ingest(&settings, &cfg, &out),
        Command::BuildNet => commands::build_net(&settings, &cfg, &out),
        Command::Embed => commands::embed(&settings, &cfg, &out),
        Command::Compare => commands::compare(&settings, &cfg, &out),
        Command::CrossPeriod => commands::cross_period(&settings, &cfg, &out),
        Command::Synth => commands::synth(&cfg, &out),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .format_timestamp(None)
        .init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            error!("{e}");
            ExitCode::from(e.exit_code())
        }
    }
}
