//! `kreinlab`: batch verification reports.
//!
//! Exit status is 0 when every check passes, 1 when a check fails or a
//! computation errors, and 2 for invalid configuration.

mod commands;
mod config;
mod report;

use std::process::ExitCode;

use clap::Parser;
use config::{Cli, Command, Format, UsageError};
use report::{render_csv, render_json, SuiteReport};

enum Failure {
    Usage(String),
    Runtime(String),
}

impl From<UsageError> for Failure {
    fn from(e: UsageError) -> Self {
        Failure::Usage(e.0)
    }
}

impl From<kreinlab::Error> for Failure {
    fn from(e: kreinlab::Error) -> Self {
        use kreinlab::Error::*;
        match e {
            InvalidParameter(_) | RhoCutOutOfRange(_) | InvalidAxis(_) | NonFinite(_) | ZeroSigma => {
                Failure::Usage(e.to_string())
            }
            _ => Failure::Runtime(e.to_string()),
        }
    }
}

/// The rendered report and whether every check passed.
fn execute(cli: &Cli) -> Result<(String, bool), Failure> {
    if let Command::Suite = cli.command {
        if cli.format == Format::Csv {
            return Err(Failure::Usage("the suite report is JSON only".into()));
        }
        let mut reports = Vec::new();
        for cmd in config::suite_commands() {
            reports.push(commands::run(&cli.resolve(&cmd)?)?);
        }
        let suite = SuiteReport {
            schema: report::SCHEMA,
            version: kreinlab::VERSION,
            command: "suite",
            seed: cli.seed,
            passed: reports.iter().all(|r| r.passed),
            reports,
        };
        return Ok((render_json(&suite), suite.passed));
    }
    let cfg = cli.resolve(&cli.command)?;
    if cfg.format == Format::Csv && cfg.command == "evolve" {
        return Err(Failure::Usage("command `evolve` has no table output; use --format json".into()));
    }
    let report = commands::run(&cfg)?;
    let text = match cfg.format {
        Format::Json => render_json(&report),
        Format::Csv => render_csv(&report).map_err(|e| Failure::Usage(e.to_string()))?,
    };
    Ok((text, report.passed))
}

fn main() -> ExitCode {
    env_logger::Builder::new()
        .filter_level(log::LevelFilter::Warn)
        .format_timestamp(None)
        .init();
    let cli = Cli::parse();
    match execute(&cli) {
        Ok((text, passed)) => {
            let written = match &cli.out {
                Some(path) => std::fs::write(path, &text),
                None => {
                    use std::io::Write;
                    std::io::stdout().write_all(text.as_bytes())
                }
            };
            if let Err(e) = written {
                eprintln!("kreinlab: cannot write report: {e}");
                return ExitCode::from(2);
            }
            if passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("kreinlab: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("kreinlab: {msg}");
            ExitCode::from(1)
        }
    }
}
