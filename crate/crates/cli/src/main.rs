use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    let cli = hnd_cli::Cli::parse();
    match hnd_cli::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(hnd_cli::exit_code(&err))
        }
    }
}
