//! Command-line front end: every table and figure of the cavity model as
//! deterministic CSV or JSON.
//!
//! Exit codes: 0 on success, 1 on numerical failure or a failed check,
//! 2 on usage errors.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod args;
pub mod commands;
pub mod error;
pub mod output;

use std::ffi::OsString;
use std::io::{self, Write};

use clap::Parser;

use args::{merge_config, Cli, Command, CommonArgs};
use error::CliError;
use output::{emit, Report, DEFAULT_DIGITS};

/// Runs the command line `argv` (program name first) on the process streams.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_with(argv, &mut io::stdout().lock(), &mut io::stderr().lock())
}

/// As [`run`], writing to the given streams.
pub fn run_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                2
            } else {
                let _ = write!(out, "{text}");
                0
            };
        }
    };
    match dispatch(cli.command, out, err) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            if matches!(e, CliError::Usage(_)) {
                let _ = writeln!(err, "run 'mim <command> --help' for usage");
            }
            e.exit_code()
        }
    }
}

fn finish(report: Report, common: &CommonArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let digits = common.digits.unwrap_or(DEFAULT_DIGITS);
    if digits == 0 || digits > 17 {
        return Err(CliError::Usage(format!("--digits {digits} must lie in 1..=17")));
    }
    emit(&report, common.format.unwrap_or_default(), digits, common.output.as_deref(), out)?;
    match report.failure {
        Some(msg) => Err(CliError::Check(msg)),
        None => Ok(()),
    }
}

fn dispatch(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    macro_rules! resolve {
        ($a:expr) => {
            merge_config(&$a, $a.common.config.as_deref())?
        };
    }
    match command {
        Command::Spectrum(a) => {
            let a = resolve!(a);
            finish(commands::spectrum(&a)?, &a.common, out)
        }
        Command::Structural(a) => {
            let a = resolve!(a);
            finish(commands::structural(&a)?, &a.common, out)
        }
        Command::Midpoint(a) => {
            let a = resolve!(a);
            finish(commands::midpoint(&a)?, &a.common, out)
        }
        Command::Sweep(a) => {
            let a = resolve!(a);
            finish(commands::sweep(&a)?, &a.common, out)
        }
        Command::Modes(a) => {
            let a = resolve!(a);
            finish(commands::mode_profiles(&a)?, &a.common, out)
        }
        Command::Couplings(a) => {
            let a = resolve!(a);
            finish(commands::couplings(&a)?, &a.common, out)
        }
        Command::Simulate(a) => {
            let a = resolve!(a);
            finish(commands::simulate(&a, err)?, &a.common, out)
        }
    }
}
