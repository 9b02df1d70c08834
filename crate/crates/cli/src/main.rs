mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use tomowitness::LiftStrategy;

use crate::commands::Invocation;
use crate::config::Overrides;

#[derive(Parser)]
#[command(name = "tomowitness", version, about = "Tomographic lifts of quantum generators and a stochasticity witness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Tomographic vector of a state.
    Encode(Common),
    /// Density matrix from a tomographic vector, with a positivity check.
    Decode(Common),
    /// Lifted generator acting on tomographic vectors.
    Lift(Common),
    /// Classical-compatibility verdict with a JSON run report.
    Witness(Common),
    /// Tomographic and density-matrix trajectories as CSV.
    Evolve(Common),
    /// Built-in qubit models under both lift strategies.
    Example(ExampleArgs),
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    #[command(flatten)]
    shared: Shared,
}

#[derive(Args)]
struct ExampleArgs {
    /// example1, example2 or example3
    name: Option<String>,
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    shared: Shared,
}

#[derive(Args)]
struct Shared {
    #[arg(long)]
    state: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    strategy: Option<LiftStrategy>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
}

impl Shared {
    fn overrides(&self) -> Overrides {
        Overrides { strategy: self.strategy, tolerance: self.tol, seed: self.seed }
    }
}

fn invocation(c: Common) -> Invocation {
    let overrides = c.shared.overrides();
    Invocation { config: c.config, state: c.shared.state, out: c.shared.out, overrides }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Encode(c) => commands::encode_cmd(&invocation(c)),
        Command::Decode(c) => commands::decode_cmd(&invocation(c)),
        Command::Lift(c) => commands::lift_cmd(&invocation(c)),
        Command::Witness(c) => commands::witness_cmd(&invocation(c)),
        Command::Evolve(c) => commands::evolve_cmd(&invocation(c)),
        Command::Example(e) => {
            let overrides = e.shared.overrides();
            commands::example_cmd(e.name.as_deref(), e.config.as_deref(), e.shared.out.as_deref(), &overrides)
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
