//! Command-line front end for the lmgfs fidelity sweeps.

pub mod args;
pub mod commands;
pub mod engine;
pub mod error;
pub mod output;

use std::ffi::OsString;

use clap::error::ErrorKind;
use clap::Parser;

use args::{Cli, CommandKind};
use error::CliResult;

fn execute(cli: Cli) -> CliResult<commands::Report> {
    let settings = args::resolve(cli.command)?;
    match settings.command {
        CommandKind::SweepH => commands::sweep_h(&settings),
        CommandKind::SweepTau => commands::sweep_tau(&settings),
        CommandKind::Compare => commands::compare(&settings),
        CommandKind::PeakScan => commands::peak_scan(&settings),
    }
}

/// Parse `args`, run the command and return the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
        }
    };
    match execute(cli) {
        Ok(report) => {
            for w in &report.warnings {
                eprintln!("warning: {w}");
            }
            if let Some(text) = &report.text {
                print!("{text}");
            }
            for path in &report.written {
                eprintln!("wrote {path}");
            }
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
