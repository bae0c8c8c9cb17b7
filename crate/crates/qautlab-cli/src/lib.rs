//! Command-line front end: validation, simulation, sweeps, conversions and oracle checks
//! over `.qaut` machine files.

mod commands;
mod decide;

use std::ffi::OsString;
use std::io::Write;
use std::path::Path;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use qautlab::machines::MachineSpec;
use qautlab::textio::parse_machine;
use qautlab::zoo::CutpointMode;

pub use commands::{sweep_csv, SweepOptions, SweepRow};
pub use decide::{gap, Decider};

/// Command failures, split by exit status.
#[derive(Debug, Error)]
pub enum Failure {
    /// Contract or validation failure (exit 1).
    #[error("{0}")]
    Contract(String),
    /// Usage, parse or I/O error (exit 2).
    #[error("{0}")]
    Usage(String),
}

impl Failure {
    pub fn code(&self) -> i32 {
        match self {
            Failure::Contract(_) => 1,
            Failure::Usage(_) => 2,
        }
    }
}

pub(crate) fn usage(e: impl std::fmt::Display) -> Failure {
    Failure::Usage(e.to_string())
}

#[derive(Debug, Parser)]
#[command(name = "qautlab", version, about = "Simulate, check and convert probabilistic and quantum finite automata")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct CutpointArgs {
    /// Cutpoint λ for verdicts.
    #[arg(long)]
    pub cutpoint: Option<f64>,
    /// strict, nonstrict, exclusive or one-sided.
    #[arg(long, value_parser = parse_mode)]
    pub mode: Option<CutpointMode>,
}

fn parse_mode(s: &str) -> Result<CutpointMode, String> {
    CutpointMode::parse(s).ok_or_else(|| format!("unknown mode `{s}` (strict, nonstrict, exclusive, one-sided)"))
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse and validate a machine file.
    Check { file: String },
    /// Run a machine on one word.
    Run {
        file: String,
        /// The input word; use "" for the empty word.
        word: String,
        #[command(flatten)]
        cut: CutpointArgs,
        /// Step cap for one-way machines.
        #[arg(long)]
        step_cap: Option<usize>,
        /// Seed for the Monte Carlo estimate of restart machines.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Monte Carlo trials for restart machines.
        #[arg(long)]
        mc: Option<usize>,
        /// Separator between multi-glyph symbols.
        #[arg(long)]
        word_sep: Option<String>,
    },
    /// Tabulate all words up to a length as CSV.
    Sweep {
        file: String,
        #[arg(long)]
        max_len: usize,
        /// Comma-separated subset of the machine's letters to enumerate.
        #[arg(long)]
        alphabet: Option<String>,
        /// Language whose membership fills the `oracle_member` column.
        #[arg(long)]
        oracle: Option<String>,
        #[command(flatten)]
        cut: CutpointArgs,
        /// Output path; stdout when absent.
        #[arg(long)]
        csv: Option<String>,
        #[arg(long)]
        word_sep: Option<String>,
    },
    /// Apply a construction to a machine file.
    Convert {
        #[arg(long)]
        rule: String,
        input: String,
        output: String,
        #[command(flatten)]
        params: commands::ConvertParams,
    },
    /// Write a ready-made machine, or list them with `--list`.
    Zoo {
        name: Option<String>,
        output: Option<String>,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long)]
        list: bool,
    },
    /// Reduce the error of a restart or postselection machine below a target.
    Amplify {
        input: String,
        /// Certified error of the input.
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        target_eps: f64,
        output: String,
    },
    /// Check a certified relation on every word up to a length.
    Verify {
        input: String,
        /// Membership oracle, e.g. `L_eq` or `A_m(3)`.
        #[arg(long)]
        oracle: Option<String>,
        /// Reference machine whose cutpoint verdicts stand in for membership.
        #[arg(long)]
        against: Option<String>,
        #[arg(long)]
        max_len: usize,
        /// Bounded error: members at least `1 − bound`, nonmembers at most `bound`.
        #[arg(long)]
        bound: Option<f64>,
        /// With `--bound`: members must be accepted with certainty.
        #[arg(long)]
        members_exact: bool,
        #[command(flatten)]
        cut: CutpointArgs,
        #[arg(long)]
        word_sep: Option<String>,
    },
}

pub(crate) fn load(path: &str) -> Result<MachineSpec, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| usage(format!("{path}: {e}")))?;
    parse_machine(&text).map_err(|e| usage(format!("{path}: {e}")))
}

pub(crate) fn write_file(path: &str, text: &str) -> Result<(), Failure> {
    std::fs::write(Path::new(path), text).map_err(|e| usage(format!("{path}: {e}")))
}

/// Parses `args` (program name first) and runs the command; returns the exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            if code == 0 {
                let _ = write!(out, "{text}");
            } else {
                let _ = write!(err, "{text}");
            }
            return code;
        }
    };
    match commands::dispatch(cli.command, out) {
        Ok(()) => 0,
        Err(f) => {
            let _ = writeln!(err, "error: {f}");
            f.code()
        }
    }
}
