//! Command-line front end for [`spraycard`].
//!
//! Exit codes: 0 success, 1 unreadable or undecodable input, 2 report
//! written but coverage above the reliability limit, 3 distorted capture
//! (card size does not match the image aspect ratio), 64 usage error.

pub mod analyze;
pub mod args;
pub mod batch;
pub mod dpi;
pub mod error;
pub mod imageio;
pub mod report;
pub mod synth;

use clap::Parser;

use crate::args::{Cli, Command};
use crate::error::exit;

/// Parses `argv` and runs the selected command, returning the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { exit::USAGE } else { exit::OK };
        }
    };
    let result = match &cli.command {
        Command::Analyze(a) => analyze::run(a),
        Command::Batch(a) => batch::run(a),
        Command::DpiCheck(a) => dpi::run(a),
        Command::Synth(a) => synth::run(a),
    };
    result.unwrap_or_else(|e| {
        eprintln!("error: {e}");
        e.exit_code()
    })
}
