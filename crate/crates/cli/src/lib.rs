//! Command-line front end for latent-evolve: single runs, parameter sweeps
//! and reports over run directories.

pub mod artifacts;
pub mod cli;
pub mod error;
pub mod evaluator;
pub mod mock_worker;
pub mod report;
pub mod run;
pub mod sweep;

use cli::{Cli, Command};
use error::{CliError, CliResult};

/// Executes a parsed command line.
pub fn dispatch(cli: &Cli) -> CliResult<()> {
    match &cli.command {
        Command::Run(args) => run::cmd_run(args).map(drop),
        Command::Sweep(args) => {
            let outcome = sweep::cmd_sweep(args)?;
            match outcome.failures.first() {
                None => Ok(()),
                Some((index, first)) => {
                    let msg = format!(
                        "{} of {} runs failed; first was run {index}: {first}",
                        outcome.failures.len(),
                        outcome.runs
                    );
                    Err(match first {
                        CliError::Config(_) => CliError::Config(msg),
                        CliError::Evaluator(_) => CliError::Evaluator(msg),
                        CliError::Io(_) => CliError::Io(msg),
                    })
                }
            }
        }
        Command::Report(args) => report::cmd_report(args),
        Command::MockWorker(args) => mock_worker::cmd_mock_worker(args),
    }
}
