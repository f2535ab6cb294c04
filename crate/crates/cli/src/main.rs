use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    match dno_cli::run(dno_cli::config::Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
