//! `curvedyn`: trajectories, audits and potential profiles from the command line.
//!
//! Exit status: 0 on success, 1 on an error, 2 when an audit or orbit check
//! fails its threshold or a trajectory is truncated.

mod commands;
mod config;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{RunArgs, SEED_ENV};

#[derive(Parser)]
#[command(name = "curvedyn", version, about = "Superintegrable systems on S3, E3 and H3")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate one orbit; writes trajectory.csv and conservation.json.
    Trajectory(RunArgs),
    /// Bracket identities, Fradkin properties and independence ranks; writes audit.json.
    Audit(RunArgs),
    /// Potential along the ray theta = pi/2, phi = pi/4, one CSV per curvature.
    Potential(RunArgs),
    /// Check whether bounded orbits return to their start; writes closed_orbit.json.
    ClosedOrbit(RunArgs),
    ListSystems,
    /// All observable names, or the catalog of one system.
    ListObservables {
        #[arg(long)]
        system: Option<String>,
    },
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    let (args, cmd): (&RunArgs, fn(&config::RunConfig) -> anyhow::Result<commands::Outcome>) = match &cli.command {
        Command::ListSystems => {
            print!("{}", commands::list_systems());
            return Ok(ExitCode::SUCCESS);
        }
        Command::ListObservables { system } => {
            print!("{}", commands::list_observables(system.as_deref())?);
            return Ok(ExitCode::SUCCESS);
        }
        Command::Trajectory(a) => (a, commands::trajectory),
        Command::Audit(a) => (a, commands::audit),
        Command::Potential(a) => (a, commands::potential),
        Command::ClosedOrbit(a) => (a, commands::closed_orbit),
    };
    let config = args.resolve(std::env::var(SEED_ENV).ok())?;
    if args.emit_config {
        println!("{}", serde_json::to_string_pretty(&config)?);
        return Ok(ExitCode::SUCCESS);
    }
    let outcome = cmd(&config)?;
    for f in &outcome.files {
        eprintln!("wrote {}", f.display());
    }
    Ok(if outcome.passed { ExitCode::SUCCESS } else { ExitCode::from(2) })
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
