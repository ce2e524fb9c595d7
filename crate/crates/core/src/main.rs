use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use trotter_split::cli::{execute, CommandKind, Options};

#[derive(Parser)]
#[command(
    name = "trotter",
    version,
    about = "Splitting scheme for gradient flows"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Directory for output files (overrides `output_dir` in the config)
    #[arg(long, global = true)]
    output_dir: Option<PathBuf>,
    /// Seed for probe sampling (overrides `seed` in the config)
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(short, long, global = true)]
    verbose: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Run the scheme and write the trajectory
    Run { config: PathBuf },
    /// Measure convergence over `step_counts`
    Convergence { config: PathBuf },
    /// Evaluate the inequality checks; exits 1 if any fails
    Check { config: PathBuf },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    env_logger::Builder::new()
        .filter_level(if cli.verbose {
            log::LevelFilter::Info
        } else {
            log::LevelFilter::Warn
        })
        .parse_default_env()
        .init();
    let (kind, config) = match cli.command {
        Command::Run { config } => (CommandKind::Run, config),
        Command::Convergence { config } => (CommandKind::Convergence, config),
        Command::Check { config } => (CommandKind::Check, config),
    };
    let opts = Options {
        output_dir: cli.output_dir,
        seed: cli.seed,
    };
    ExitCode::from(execute(kind, &config, &opts) as u8)
}
