use clap::{Parser, ValueEnum};
use hj_cli::{run, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Stage {
    Geometry,
    Profile,
    Solve2d,
    Solvegraph,
    Converge,
    Report,
    Check,
}

impl From<Stage> for Subcommand {
    fn from(s: Stage) -> Self {
        match s {
            Stage::Geometry => Subcommand::Geometry,
            Stage::Profile => Subcommand::Profile,
            Stage::Solve2d => Subcommand::Solve2d,
            Stage::Solvegraph => Subcommand::SolveGraph,
            Stage::Converge => Subcommand::Converge,
            Stage::Report => Subcommand::Report,
            Stage::Check => Subcommand::Check,
        }
    }
}

/// Averaging pipeline for Hamilton-Jacobi equations with a large
/// Hamiltonian drift.
#[derive(Debug, Parser)]
#[command(name = "hj-averager", version)]
struct Args {
    #[arg(value_enum)]
    stage: Stage,
    /// Experiment config (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides `output` in the config.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let sub = Subcommand::from(args.stage);
    match run(sub, &args.config, args.out) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("hj-averager {sub}: {e}");
            ExitCode::FAILURE
        }
    }
}
