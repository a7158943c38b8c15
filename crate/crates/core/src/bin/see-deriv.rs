use std::process::ExitCode;

use clap::Parser;
use see_deriv::cli::{execute, threads_from_env, Cli};
use see_deriv::parallel::configure_threads;

fn main() -> ExitCode {
    let cli = Cli::parse();
    configure_threads(threads_from_env());
    match execute(&cli.command, &mut std::io::stdout().lock()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
