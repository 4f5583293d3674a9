use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use ultsup_cli::config::{Command, Overrides, RunConfig};
use ultsup_cli::{commands, parallel};

/// Drawdown stopping solver for spectrally negative Lévy processes.
///
/// A JSON configuration file describes the run; flags override the
/// command, offset b, simulation seed, path count and output path.
#[derive(Parser, Debug)]
#[command(name = "ultsup", version, about)]
struct Cli {
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,

    /// Command override: validate, solve, curves, simulate or verify.
    #[arg(long)]
    command: Option<Command>,

    /// Penalty offset override.
    #[arg(long)]
    b: Option<f64>,

    /// Simulation seed override.
    #[arg(long)]
    seed: Option<u64>,

    /// Path count override.
    #[arg(long)]
    n_paths: Option<u64>,

    /// Output file override.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    parallel::init_thread_pool();

    let overrides = Overrides {
        command: cli.command,
        b: cli.b,
        seed: cli.seed,
        n_paths: cli.n_paths,
        out: cli.out,
    };

    let config = match RunConfig::load(&cli.config) {
        Ok(c) => c.apply(&overrides),
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };

    let mut stdout = std::io::stdout().lock();
    match commands::run(&config, &mut stdout) {
        Ok(outcome) => ExitCode::from(outcome.exit_code() as u8),
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
