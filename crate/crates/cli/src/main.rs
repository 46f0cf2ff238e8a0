use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    let cli = mrtime::cli::Cli::parse();
    match mrtime::cli::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}
