use std::io::Write;
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;

mod cli;
mod commands;
mod config;
mod error;
mod grid;
mod report;

use cli::{Cli, Command};
use error::{CliError, CliResult};
use report::{to_json_string, Report};

fn emit(text: &str, out: Option<&std::path::Path>) -> CliResult<()> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::io(path, e)),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Io(format!("stdout: {e}"))),
    }
}

fn run(cli: &Cli) -> CliResult<i32> {
    let name = cli.command.name();
    let cfg = cli.common.resolve(name)?;
    let started = Instant::now();

    if let Command::ExportSamples {
        grid_u,
        grid_lambda,
        closed,
    } = &cli.command
    {
        let grid = if *closed {
            commands::export::closed_grid(&cfg)?
        } else {
            commands::export::product_grid(&cfg, *grid_u, *grid_lambda)?
        };
        emit(&to_json_string(&grid), cfg.out.as_deref())?;
        eprintln!(
            "{name}: {} records, {} triples ({:.3} s)",
            grid.records.len(),
            grid.triples.len(),
            started.elapsed().as_secs_f64()
        );
        return Ok(0);
    }

    let mut report = Report::new(&cfg);
    let outcome = match &cli.command {
        Command::VerifyQdybe { grid_file } => commands::verify::run(&cfg, grid_file.as_deref(), &mut report),
        Command::Gauge { action } => commands::gauge::run(&cfg, action, &mut report),
        Command::SolveDifference(args) => commands::solve::run(&cfg, args, &mut report),
        Command::ExportSamples { .. } => unreachable!("handled above"),
    };
    match outcome {
        Ok(()) => report.finish(),
        Err(e @ CliError::Data(_)) => report.fail_with(&e),
        Err(e) => return Err(e),
    }
    let elapsed = started.elapsed().as_secs_f64();
    if cli.common.timing {
        report.wall_time_s = Some(elapsed);
    }
    emit(&report.to_json_string(), cfg.out.as_deref())?;

    let verdict = serde_json::to_value(report.verdict).expect("verdict serializes");
    eprint!("{name}: {}", verdict.as_str().unwrap_or("?"));
    for c in &report.checks {
        eprint!(" | {} {:.3e}", c.name, c.residual);
    }
    if let Some(err) = &report.error {
        eprint!(" | {} error: {}", err.kind, err.message);
    }
    eprintln!(" ({elapsed:.3} s)");
    Ok(report.exit_code())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 64 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("qdybe: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
