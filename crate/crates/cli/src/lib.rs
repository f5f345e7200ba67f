//! Experiment front end for `qbmax-core`: every subcommand produces one CSV
//! report with a commented config header and a commented summary.
//!
//! Exit codes: 0 when every check passes or is skipped, 1 when an
//! inequality is violated, 2 on usage or configuration errors.

pub mod args;
pub mod commands;
pub mod report;

use std::fs::File;
use std::io::{self, BufWriter, Write};

use args::{Cli, Command};
use report::ExperimentReport;

pub fn build_report(cli: &Cli) -> anyhow::Result<ExperimentReport> {
    match &cli.command {
        Command::Eval(a) => commands::cmd_eval(a),
        Command::Bound(a) => commands::cmd_bound(a),
        Command::Verify(a) => commands::cmd_verify(a),
        Command::Stat(a) => commands::cmd_stat(a),
    }
}

fn out_option(cli: &Cli) -> Option<&std::path::Path> {
    match &cli.command {
        Command::Eval(a) => a.out.as_deref(),
        Command::Bound(a) => a.out.as_deref(),
        Command::Verify(a) => a.out.as_deref(),
        Command::Stat(a) => a.out.as_deref(),
    }
}

/// Build the report, write it and return the exit code.
pub fn run(cli: &Cli) -> anyhow::Result<i32> {
    let report = build_report(cli)?;
    match out_option(cli) {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            report.write_csv(&mut w)?;
            w.flush()?;
        }
        None => {
            let mut w = BufWriter::new(io::stdout().lock());
            report.write_csv(&mut w)?;
            w.flush()?;
        }
    }
    Ok(report.exit_code())
}
