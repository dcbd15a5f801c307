//! Command-line interface: `simulate`, `track`, `identify`, `eval` and
//! `pipeline`. Exit codes are 0 on success, 1 on runtime failure and 2 on
//! usage or configuration errors.

mod commands;
mod config;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::core::files::read_json;
use crate::error::Error;
use crate::ident::AggregationMethod;
use crate::sim::ScenarioConfig;

pub use commands::{cmd_eval, cmd_identify, cmd_pipeline, cmd_simulate, cmd_track, IdentFlags};
pub use config::{RunConfig, VideoConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_RUNTIME: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "rinktrack", version, about = "Player tracking, identification and MOT evaluation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a synthetic scenario bundle from a scenario config.
    Simulate {
        #[command(flatten)]
        io: Io,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run the tracker on each video's detections.
    Track {
        #[command(flatten)]
        io: Io,
    },
    /// Assign team and jersey identities to each tracklet.
    Identify {
        #[command(flatten)]
        io: Io,
        #[command(flatten)]
        ident: IdentArgs,
    },
    /// Compute MOTA, IDF1, identity switches and the pan sweep.
    Eval {
        #[command(flatten)]
        io: Io,
    },
    /// Simulate (if configured), track, identify and evaluate.
    Pipeline {
        #[command(flatten)]
        io: Io,
        #[command(flatten)]
        ident: IdentArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Debug, Args)]
struct Io {
    /// JSON config file.
    #[arg(long, value_name = "PATH")]
    config: PathBuf,
    /// Output directory.
    #[arg(long, value_name = "DIR")]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct IdentArgs {
    /// Skip roster masking.
    #[arg(long)]
    no_roster: bool,
    #[arg(long, value_enum)]
    aggregation: Option<AggregationArg>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum AggregationArg {
    Avg,
    Majority,
}

impl IdentArgs {
    fn flags(&self) -> IdentFlags {
        IdentFlags {
            no_roster: self.no_roster,
            aggregation: self.aggregation.map(|a| match a {
                AggregationArg::Avg => AggregationMethod::Averaging,
                AggregationArg::Majority => AggregationMethod::Majority,
            }),
        }
    }
}

struct Failure {
    code: i32,
    error: Error,
}

fn usage(error: Error) -> Failure {
    Failure { code: EXIT_USAGE, error }
}

impl From<Error> for Failure {
    fn from(error: Error) -> Self {
        let code = match error {
            Error::Config(_) | Error::Infeasible(_) => EXIT_USAGE,
            _ => EXIT_RUNTIME,
        };
        Failure { code, error }
    }
}

fn load_run(path: &Path) -> Result<RunConfig, Failure> {
    RunConfig::load(path).map_err(usage)
}

fn run(command: Command) -> Result<String, Failure> {
    Ok(match command {
        Command::Simulate { io, seed } => {
            let scenario: ScenarioConfig = read_json(&io.config).map_err(usage)?;
            cmd_simulate(&scenario, seed, &io.out, &RunConfig::default())?
        }
        Command::Track { io } => cmd_track(&load_run(&io.config)?, &io.out)?,
        Command::Identify { io, ident } => {
            cmd_identify(&load_run(&io.config)?, ident.flags(), &io.out)?
        }
        Command::Eval { io } => cmd_eval(&load_run(&io.config)?, &io.out)?,
        Command::Pipeline { io, ident, seed } => {
            cmd_pipeline(&load_run(&io.config)?, ident.flags(), seed, &io.out)?
        }
    })
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match run(cli.command) {
        Ok(text) => {
            print!("{text}");
            EXIT_OK
        }
        Err(f) => {
            eprintln!("error: {}", f.error);
            f.code
        }
    }
}
