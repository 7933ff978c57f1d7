//! Command-line front end for `cohsteer`.
//!
//! Subcommands: `theory`, `simulate`, `sigeur`, `verify`, `report`. Exit
//! codes: 0 on success, 1 when a verification check (or I/O) fails, 2 when
//! the configuration or arguments are invalid.

pub mod args;
pub mod commands;
pub mod error;
pub mod output;

pub use args::{Cli, Command};
pub use error::{CliError, CliResult};

pub fn run(cli: &Cli) -> CliResult<()> {
    match &cli.command {
        Command::Theory(a) => commands::theory(a),
        Command::Simulate(a) => commands::simulate(a),
        Command::Sigeur(a) => commands::sigeur(a),
        Command::Verify(a) => commands::verify(a),
        Command::Report(a) => commands::report(a),
    }
}
