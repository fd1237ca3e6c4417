use clap::Parser;
use leibniz_cli::commands::{dispatch, Cli};
use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(dispatch(Cli::parse()))
}
