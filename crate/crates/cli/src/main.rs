//! `haltlab`: parse, run and analyse guarded-command programs, and replay
//! the halting-problem experiments.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

/// Default per-run step budget.
pub const DEFAULT_BUDGET: u64 = 10_000;

#[derive(Debug, Parser)]
#[command(name = "haltlab", version, about = "Halting-problem laboratory for a small guarded-command language")]
pub struct Cli {
    #[command(flatten)]
    pub output: OutputArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Report format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    pub format: Format,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    /// Line-oriented `key=value` records.
    Records,
}

#[derive(Debug, Args)]
pub struct ProgramArgs {
    /// Source file (.gcl).
    pub path: PathBuf,
    /// Declaration to start from; defaults to the `main` line, else the last declaration.
    #[arg(long)]
    pub entry: Option<String>,
    /// Integer width in bits.
    #[arg(long, default_value_t = 8, value_parser = clap::value_parser!(u32).range(1..=64))]
    pub width: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    /// Remember every configuration, stop at the first revisit.
    Visited,
    /// Run past the configuration-count bound.
    Counter,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a source file and print it in canonical layout.
    Parse {
        path: PathBuf,
    },
    /// Execute a declaration for a bounded number of steps.
    Run {
        #[command(flatten)]
        program: ProgramArgs,
        /// Maximum number of steps.
        #[arg(long, env = "HALTLAB_BUDGET", default_value_t = DEFAULT_BUDGET)]
        budget: u64,
        /// Print one line per visited configuration.
        #[arg(long)]
        trace: bool,
    },
    /// Print the canonical code of every declaration.
    Encode {
        path: PathBuf,
    },
    /// Decide whether a declaration halts.
    Decide {
        #[command(flatten)]
        program: ProgramArgs,
        #[arg(long, value_enum, default_value_t = Method::Visited)]
        method: Method,
        /// Give up after this many steps (visited method only).
        #[arg(long)]
        cap: Option<u64>,
    },
    /// Try every halt map over the programs in the given files.
    Models {
        #[arg(required = true)]
        paths: Vec<PathBuf>,
        #[arg(long, default_value_t = 8, value_parser = clap::value_parser!(u32).range(1..=64))]
        width: u32,
    },
    /// Derive trm(S) for S = if H(S) then Loop end.
    Paradox {
        /// Do not assume that the halt test itself terminates.
        #[arg(long)]
        without_trm_h: bool,
    },
    /// Exhaustive counterexample searches.
    #[command(subcommand)]
    Search(SearchCommand),
    /// Diagonalize over the built-in machine family.
    Beta {
        /// Prefix length.
        #[arg(long, default_value_t = 8)]
        k: usize,
        /// Steps allowed per bit.
        #[arg(long, default_value_t = 1000)]
        budget: u64,
        /// Family size; defaults to max(k, 8).
        #[arg(long)]
        family: Option<usize>,
    },
}

#[derive(Debug, Subcommand)]
pub enum SearchCommand {
    /// Every even number up to the bound as a sum of two primes.
    Goldbach {
        #[arg(long, default_value_t = 1_000_000)]
        max: u64,
        /// Do not count 1 as a prime.
        #[arg(long)]
        exclude_one: bool,
    },
    /// a^n + b^n = c^n over a bounded range.
    Fermat {
        #[arg(long, default_value_t = 3)]
        min_exp: u32,
        #[arg(long, default_value_t = 7)]
        max_exp: u32,
        #[arg(long, default_value_t = 100)]
        max_base: u64,
    },
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Internal(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Internal(_) => 3,
        }
    }
}

/// What a command produced: the report, diagnostics for the error stream,
/// and whether it is a finding.
#[derive(Default)]
pub struct Report {
    pub text: String,
    pub diagnostics: String,
    pub finding: bool,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::dispatch(&cli) {
        Ok(report) => {
            eprint!("{}", report.diagnostics);
            if let Err(e) = emit(&cli.output, &report.text) {
                eprintln!("haltlab: {e}");
                return ExitCode::from(3);
            }
            ExitCode::from(u8::from(report.finding))
        }
        Err(e) => {
            eprintln!("haltlab: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn emit(output: &OutputArgs, text: &str) -> std::io::Result<()> {
    match &output.out {
        Some(path) => std::fs::write(path, text),
        None => {
            use std::io::Write;
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()
        }
    }
}
