use std::process::ExitCode;

use clap::Parser;

mod args;
mod commands;
mod config;
mod failure;
mod output;

fn main() -> ExitCode {
    let cli = args::Cli::parse();
    let result = config::Settings::resolve(&cli.common)
        .and_then(|settings| commands::run(&cli.command, &settings));
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) if f.silent => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {f}");
            f.exit_code()
        }
    }
}
