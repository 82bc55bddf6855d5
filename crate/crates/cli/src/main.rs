//! Command-line access to feasibility analysis, schedule synthesis, figure
//! data, the STIRAP study and holonomies.

mod analysis;
mod config;
mod figures;
mod path_source;
mod stirap_cmd;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

/// Exit status of a command.
pub type Status = u8;

pub const EXIT_OK: Status = 0;
pub const EXIT_INPUT: Status = 2;
pub const EXIT_INFEASIBLE: Status = 3;
pub const EXIT_INDETERMINATE: Status = 4;

/// Adiabatic passage through level crossings.
///
/// Every run writes its outputs and the fully resolved configuration
/// (`config.json`) to the output directory; passing that file back with
/// `--config` repeats the run.
#[derive(Parser, Debug)]
#[command(name = "levelcross", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide whether a path's crossing is reachable in finite time (exit 3 if not, 4 if undecidable).
    Feasibility(analysis::FeasibilityArgs),
    /// Synthesize the uniform-violation schedule Γ(t) along a path.
    Schedule(analysis::ScheduleArgs),
    /// Regenerate figure data.
    #[command(subcommand)]
    Fig(figures::FigureCommand),
    /// Population transfer through the three-level system.
    Stirap(stirap_cmd::StirapArgs),
    /// Transport a level around a loop.
    Holonomy(stirap_cmd::HolonomyArgs),
}

fn run(cli: &Cli) -> anyhow::Result<Status> {
    match &cli.command {
        Command::Feasibility(a) => analysis::feasibility(a),
        Command::Schedule(a) => analysis::schedule(a),
        Command::Fig(f) => figures::run(f),
        Command::Stirap(a) => stirap_cmd::stirap(a),
        Command::Holonomy(a) => stirap_cmd::holonomy(a),
    }
}

/// Prints a line to stdout; a closed pipe is not an error.
pub fn emit(text: &str) {
    use std::io::Write;
    let _ = writeln!(std::io::stdout(), "{text}");
}

fn exit_code(err: &anyhow::Error) -> Status {
    match err.downcast_ref::<levelcross::Error>() {
        Some(levelcross::Error::Indeterminate { .. }) => EXIT_INDETERMINATE,
        _ => EXIT_INPUT,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
