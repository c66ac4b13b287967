//! The `tailward` command line.
//!
//! Exit codes: 0 all checks passed, 1 a check failed, 2 bad input,
//! 3 a hypothesis does not hold, 4 numerics failed.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use tailward_core::{Error, ErrorClass};

mod commands;
pub mod report;
mod verify;

pub use report::{Rule, RuleOutcome, VerifyReport};
pub use verify::FIXTURES;

#[derive(Parser, Debug)]
#[command(name = "tailward", version, about = "Tail asymptotics, exact oracles and simulators")]
pub struct Cli {
    /// Worker threads for Monte Carlo and tables (default: TAILWARD_THREADS or all cores).
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Closed-form tail of X + Y or X·Y.
    Tail {
        op: OpArg,
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
    },
    /// Compare an asymptotic tail with an exact oracle and emit a report.
    Verify(VerifyArgs),
    /// Gaussian suprema with power trends.
    #[command(subcommand)]
    Gp(GpCommand),
    /// Re-run a report and check it reproduces.
    Replay { report: PathBuf },
    /// List named fixtures.
    Fixtures,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum OpArg {
    Sum,
    Product,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum VerifyKind {
    Sum,
    Product,
    Laplace,
    Watson,
}

#[derive(Args, Debug, Clone)]
pub struct VerifyArgs {
    pub kind: VerifyKind,
    #[arg(long)]
    pub fixture: Option<String>,
    #[arg(long)]
    pub x: Option<String>,
    #[arg(long)]
    pub y: Option<String>,
    /// `a:b:step` or a comma-separated list.
    #[arg(long)]
    pub grid: Option<String>,
    #[arg(long)]
    pub mu: Option<f64>,
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Write `<prefix>.json` and `<prefix>.csv`.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum GpCommand {
    /// Constants of the deterministic-trend asymptotics.
    Constants {
        #[arg(long = "H")]
        h: f64,
        #[arg(long)]
        beta: f64,
        #[arg(long = "alpha-loc")]
        alpha_loc: f64,
        #[arg(long, default_value_t = 1.0)]
        c: f64,
        #[arg(long)]
        pickands: Option<f64>,
        #[arg(long = "s-ref", default_value_t = 1.0)]
        s_ref: f64,
        #[arg(long = "d-ref", default_value_t = 1.0)]
        d_ref: f64,
    },
    /// Tail of the supremum under a random trend (and offset).
    Tail {
        /// Model JSON, or `@path` to read it from a file.
        #[arg(long)]
        model: String,
    },
    /// Check a Brownian fixture against the exact oracle or simulation.
    Verify {
        #[arg(long, default_value = "bm")]
        preset: String,
        #[arg(long)]
        fixture: String,
        #[arg(long)]
        paths: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Simulate fBm paths.
    Fbm {
        #[arg(long = "H")]
        h: f64,
        #[arg(long)]
        steps: usize,
        #[arg(long = "T", default_value_t = 1.0)]
        horizon: f64,
        #[arg(long, default_value_t = 1)]
        paths: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = DumpFormat::Bin)]
        format: DumpFormat,
    },
    /// Estimate a Pickands constant.
    Pickands {
        #[arg(long)]
        alpha: f64,
        #[arg(long = "T", default_value_t = 40.0)]
        horizon: f64,
        #[arg(long, default_value_t = 10_000)]
        paths: usize,
        #[arg(long, default_value_t = 1 << 14)]
        steps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = PickandsArg::ChangeOfMeasure)]
        method: PickandsArg,
    },
    /// Estimate E(sup X(t)/(1+t^β))^α.
    Econst {
        #[arg(long, default_value = "bm")]
        process: String,
        /// One or more orders.
        #[arg(long, required = true, num_args = 1.., value_delimiter = ',')]
        alpha: Vec<f64>,
        #[arg(long)]
        beta: f64,
        #[arg(long = "T", default_value_t = 20.0)]
        horizon: f64,
        #[arg(long, default_value_t = 4000)]
        paths: usize,
        #[arg(long, default_value_t = 1 << 16)]
        steps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum DumpFormat {
    Bin,
    Csv,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum PickandsArg {
    ChangeOfMeasure,
    PlugIn,
}

/// What a successful command produced.
pub enum Outcome {
    /// Printed output; nothing to check.
    Done,
    /// A report whose verdict sets the exit code.
    Checked(bool),
}

pub fn exit_code(e: &Error) -> i32 {
    match e.class() {
        ErrorClass::Input => 2,
        ErrorClass::Hypothesis => 3,
        ErrorClass::Numeric => 4,
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let args: Vec<std::ffi::OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            let text = e.render().to_string();
            let _ = if code == 0 { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    let argv: Vec<String> = args.iter().skip(1).map(|a| a.to_string_lossy().into_owned()).collect();
    match commands::execute(cli, argv, out) {
        Ok(Outcome::Done) | Ok(Outcome::Checked(true)) => 0,
        Ok(Outcome::Checked(false)) => 1,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}
