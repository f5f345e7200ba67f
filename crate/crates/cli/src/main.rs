use std::process::ExitCode;

use clap::Parser;
use qbmax::args::Cli;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match qbmax::run(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(err) => {
            eprintln!("qbmax: {err:#}");
            ExitCode::from(2)
        }
    }
}
