//! Command-line front end for `projtomo`: single-file projection, benchmark
//! sweeps and instance generation.
//!
//! Exit codes: 0 success, 2 malformed input or bad flags, 3 method not
//! applicable to the input kind, 4 numerical failure, 130 interrupted
//! benchmark (partial results are still written).

pub mod commands;
pub mod error;
pub mod formats;
pub mod tables;

use std::ffi::OsString;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;

use clap::Parser;

pub use commands::{Cli, Command};
pub use error::CliError;

/// Parses `args` and runs the selected command, returning the exit code.
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
    let result = match &cli.command {
        Command::Project(a) => commands::cmd_project(a),
        Command::Generate(a) => commands::cmd_generate(a),
        Command::Benchmark(a) => {
            let cancel = Arc::new(AtomicBool::new(false));
            let flag = Arc::clone(&cancel);
            // A second handler registration fails; the sweep then simply
            // cannot be interrupted gracefully.
            let _ = ctrlc::set_handler(move || flag.store(true, Ordering::SeqCst));
            commands::cmd_benchmark(a, &cancel)
        }
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
