use std::process::ExitCode;

use clap::Parser;
use innerfn_cli::{run, Cli, INPUT_ERROR_EXIT};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(status) => ExitCode::from(status.exit_code()),
        Err(e) => {
            eprintln!("innerfn: {e}");
            ExitCode::from(INPUT_ERROR_EXIT)
        }
    }
}
