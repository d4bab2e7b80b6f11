//! Command-line front end for `nda-snr`: single-frame estimation, Monte
//! Carlo sweeps written as CSV, the fourth-moment curve, and a runtime
//! benchmark.

pub mod args;
pub mod commands;
pub mod config_file;
pub mod csv;
pub mod error;
pub mod manifest;

use std::ffi::OsString;
use std::io::Write;

use clap::error::ErrorKind;
use clap::Parser;

pub use args::{Cli, Command};
pub use commands::{bench, cmd_bench, cmd_estimate, cmd_sweep, estimate_frame, BenchRow};
pub use error::{CliError, Result};
pub use manifest::{FigureTag, RunManifest};

/// Parses `args` (including the program name) and runs the command,
/// returning the process exit code.
pub fn run<I, A>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = A>,
    A: Into<OsString>,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let args = match config_file::merge(args) {
        Ok(args) => args,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return e.exit_code();
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = write!(out, "{}", e.render());
            return 0;
        }
        Err(e) => {
            let _ = write!(err, "{}", e.render());
            return 1;
        }
    };
    match dispatch(&cli, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(cli: &Cli, out: &mut dyn Write) -> Result<()> {
    match &cli.command {
        Command::Estimate(a) => cmd_estimate(a, out),
        Command::Sweep(a) => cmd_sweep(a, None, out).map(drop),
        Command::M4curve(a) => cmd_sweep(a, Some(FigureTag::M4curve), out).map(drop),
        Command::Bench(a) => cmd_bench(&a.k_grid, a.repetitions, a.snr_db, a.seed, out).map(drop),
    }
}
