//! `fogplace`: generate scenarios, place services, simulate failures and
//! summarise runs as CSV tables.

mod commands;
mod config;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{CommandFactory, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "fogplace", version, about = "Availability-aware service placement for fog infrastructures")]
#[command(after_help = "All flags can also be given in a TOML file passed with --config <FILE>; flags on the command line win.")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a random scenario
    Generate(commands::GenerateArgs),
    /// Compute a placement for a scenario
    Place(commands::PlaceArgs),
    /// Simulate a placed scenario and write a run directory
    Simulate(commands::SimulateArgs),
    /// Aggregate run directories into figure tables
    Report(commands::ReportArgs),
}

const USAGE_ERROR: u8 = 1;
const DATA_ERROR: u8 = 2;

fn main() -> ExitCode {
    let mut args: Vec<String> = std::env::args().collect();
    let prepared = config::take_config_path(&mut args).and_then(|path| match path {
        Some(path) => config::inject(&mut args, Path::new(&path), &Cli::command()),
        None => Ok(()),
    });
    if let Err(err) = prepared {
        eprintln!("error: {err:#}");
        return ExitCode::from(USAGE_ERROR);
    }
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return if err.use_stderr() { ExitCode::from(USAGE_ERROR) } else { ExitCode::SUCCESS };
        }
    };
    let result = match cli.command {
        Command::Generate(a) => commands::generate(&a),
        Command::Place(a) => commands::place(&a),
        Command::Simulate(a) => commands::simulate(&a),
        Command::Report(a) => commands::report(&a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(DATA_ERROR)
        }
    }
}

/// Sibling file holding the generation parameters: `s.json` -> `s.params.json`.
pub(crate) fn params_path(out: &Path) -> PathBuf {
    let stem = out.file_stem().map_or_else(|| "scenario".into(), |s| s.to_string_lossy().into_owned());
    out.with_file_name(format!("{stem}.params.json"))
}
