//! Command-line front end for the `ensreach` library.
//!
//! Systems and targets are JSON files, inputs and error profiles are CSV.
//! Exit codes: 0 success, 1 mathematical failure, 2 I/O, parse or usage
//! errors.

// `!(x > 0.0)` also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod files;
pub mod spec;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use ensreach::approx::Mode;

pub use commands::{check, simulate, synthesize, CheckReport, Outcome, SynthesisFile};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Io(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Math(#[from] ensreach::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io(_) | CliError::Parse(_) => 2,
            CliError::Math(e) if !e.is_condition_failure() => 2,
            CliError::Math(_) => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodChoice {
    /// s1 when its condition holds, otherwise s2; s2ct for continuous time.
    Auto,
    S1,
    S2,
    S2ct,
}

#[derive(Debug, Parser)]
#[command(name = "ensreach", version, about = "Open-loop input synthesis for parameter-dependent linear systems")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate the reachability conditions on the parameter grid.
    Check {
        system: PathBuf,
        /// Write the JSON report here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Construct an input steering the ensemble close to the target.
    Synthesize {
        system: PathBuf,
        target: PathBuf,
        #[arg(long, allow_negative_numbers = true)]
        eps: f64,
        #[arg(long, value_enum, default_value_t = MethodChoice::Auto)]
        method: MethodChoice,
        #[arg(long, default_value = "adaptive")]
        mode: Mode,
        /// Number of interval samples, overriding the system file.
        #[arg(long)]
        grid: Option<usize>,
        /// Input CSV path; the report goes next to it as `<stem>.report.json`.
        #[arg(long, default_value = "input.csv")]
        out: PathBuf,
    },
    /// Replay an input and report the per-sample error.
    Simulate {
        system: PathBuf,
        input: PathBuf,
        target: PathBuf,
        /// Fail with exit code 1 when the sup error exceeds this.
        #[arg(long, allow_negative_numbers = true)]
        eps: Option<f64>,
        #[arg(long)]
        grid: Option<usize>,
        /// Profile CSV path; printed to stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Parses `args` and runs the command, returning the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let result = match cli.command {
        Command::Check { system, out } => check(&system, out.as_deref()),
        Command::Synthesize { system, target, eps, method, mode, grid, out } => {
            synthesize(&system, &target, eps, method, mode, grid, &out)
        }
        Command::Simulate { system, input, target, eps, grid, out } => {
            simulate(&system, &input, &target, eps, grid, out.as_deref())
        }
    };
    match result {
        Ok(outcome) => {
            print!("{}", outcome.summary);
            match outcome.failure {
                Some(why) => {
                    eprintln!("error: {why}");
                    1
                }
                None => 0,
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
