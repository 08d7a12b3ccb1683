//! `chronoscale`: delta calculus on time scales and hypothesis-checked
//! integral inequalities from the command line.
//!
//! Exit status: 0 holds or completed, 2 not applicable, 3 violation found,
//! 1 usage or input error.

mod args;
mod commands;
mod error;
mod input;
mod output;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use error::CliResult;

fn run(cli: &Cli, argv: &[String]) -> CliResult<u8> {
    let (report, format, out) = match &cli.command {
        Command::Eval(a) => (commands::eval(a)?, a.common.format, a.common.out.as_deref()),
        Command::Check(a) => (commands::check_cmd(a)?, a.format, a.out.as_deref()),
        Command::Falsify(a) => (commands::falsify(a)?, a.format, a.out.as_deref()),
        Command::Identities(a) => (commands::identities(a)?, a.common.format, a.common.out.as_deref()),
    };
    output::emit(&output::render(&report, argv, format)?, out)?;
    Ok(report.exit)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let argv: Vec<String> = std::env::args().skip(1).collect();
    match run(&cli, &argv) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
