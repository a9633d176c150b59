mod commands;
mod config;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::commands::Artifacts;
use crate::config::ScenarioConfig;
use crate::error::{file_error, CliError};

#[derive(Parser)]
#[command(name = "ocdm", version, about = "OCDM radar, MIMO radar and RadCom simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Scenario JSON, or a manifest written by an earlier run.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory.
    #[arg(long, global = true, env = "OCDM_OUT_DIR")]
    out: Option<PathBuf>,

    /// Overrides the seed from the config.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Use the 2048 x 5120 numerology when the config leaves the waveform unset.
    #[arg(long, global = true)]
    full_scale: bool,

    /// Worker threads; defaults to one per core.
    #[arg(long, global = true)]
    parallelism: Option<usize>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Transform and receiver consistency checks.
    Selftest,
    /// Range-velocity image and peak report.
    Radar,
    /// Per transmitter-receiver pair images.
    Mimo,
    /// Joint radar image and communication report.
    Radcom,
    /// PPLR, PSLR and ISLR surfaces over the delay-Doppler grid.
    Sweep,
    /// PAPR distributions of the transmit symbols.
    Papr,
    /// Radar performance figures and data rates.
    Params,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Selftest => "selftest",
            Command::Radar => "radar",
            Command::Mimo => "mimo",
            Command::Radcom => "radcom",
            Command::Sweep => "sweep",
            Command::Papr => "papr",
            Command::Params => "params",
        }
    }
}

fn run(cli: Cli) -> Result<PathBuf, CliError> {
    if let Some(threads) = cli.parallelism {
        if threads == 0 {
            return Err(CliError::Precondition("--parallelism: must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new().num_threads(threads).build_global()?;
    }
    let config = match &cli.config {
        Some(path) => ScenarioConfig::from_json(&std::fs::read_to_string(path).map_err(file_error(path))?)?,
        None => ScenarioConfig::default(),
    };
    let mut config = config.resolve(cli.full_scale, cli.seed);
    if cli.command.name() == "mimo" && config.mimo.is_none() {
        config.mimo = Some(ocdm_core::MimoConfig::new(4, 1));
    }
    let radcom = matches!(cli.command, Command::Radcom | Command::Papr | Command::Params);
    config.validate(radcom)?;

    let dir = cli
        .out
        .or_else(|| config.output_dir.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("ocdm-out"));
    let mut out = Artifacts::create(dir)?;
    match cli.command {
        Command::Selftest => commands::selftest(&config, &mut out),
        Command::Radar => commands::radar(&config, &mut out),
        Command::Mimo => commands::mimo(&config, &mut out),
        Command::Radcom => commands::radcom(&config, &mut out),
        Command::Sweep => commands::sweep(&config, &mut out),
        Command::Papr => commands::papr(&config, &mut out),
        Command::Params => commands::params(&config, &mut out),
    }?;
    out.finish(cli.command.name(), &config)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(manifest) => {
            println!("{}", manifest.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
