//! Library side of `gammactl`: matrix file I/O, argument definitions and subcommands.

pub mod args;
pub mod commands;
pub mod error;
pub mod io;

use std::io::Write;

pub use args::Cli;
pub use commands::{run, Outcome, RunConfig};
pub use error::{exit, CliError, CliResult};
pub use io::MatrixFile;

/// Runs `cli` and routes its output; returns the process exit code.
///
/// The report goes to `--out` when given, otherwise to `stdout`. With a CSV
/// (`variety --sample`), the CSV takes `--out` or `stdout` and the report
/// moves to `stdout` or `stderr` respectively.
pub fn execute(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let result = RunConfig::from_args(&cli.global).and_then(|cfg| {
        let outcome = run(&cli.command, &cfg)?;
        route(&outcome, &cfg, stdout, stderr)?;
        Ok(outcome)
    });
    match result {
        Ok(outcome) => {
            if let Some(message) = &outcome.message {
                let _ = writeln!(stderr, "{message}");
            }
            outcome.code
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

fn route(outcome: &Outcome, cfg: &RunConfig, stdout: &mut dyn Write, stderr: &mut dyn Write) -> CliResult<()> {
    let stream = |e| CliError::Io {
        path: "<stdout>".into(),
        source: e,
    };
    match (&outcome.csv, &cfg.out) {
        (None, Some(path)) => io::write_file(path, outcome.report.as_bytes()),
        (None, None) => stdout.write_all(outcome.report.as_bytes()).map_err(stream),
        (Some(csv), Some(path)) => {
            io::write_file(path, csv.as_bytes())?;
            stdout.write_all(outcome.report.as_bytes()).map_err(stream)
        }
        (Some(csv), None) => {
            stdout.write_all(csv.as_bytes()).map_err(stream)?;
            stderr.write_all(outcome.report.as_bytes()).map_err(stream)
        }
    }
}
