use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use pinchlab_cli::{execute, CliError, ExperimentConfig, Overrides};

#[derive(Debug, Parser)]
#[command(name = "pinchlab", version, about = "Run a pinched-curvature experiment from a TOML config")]
struct Args {
    /// Experiment configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides `out`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// RNG seed (overrides `seed`).
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads, 0 for all cores (overrides `workers`).
    #[arg(long)]
    workers: Option<usize>,
    /// Integration tolerance (overrides `tol`).
    #[arg(long)]
    tol: Option<f64>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let overrides = Overrides { out: args.out, seed: args.seed, workers: args.workers, tol: args.tol };
    let result = ExperimentConfig::load(&args.config).and_then(|c| c.apply(&overrides)).and_then(|c| execute(&c));
    match result {
        Ok(outcome) => {
            println!("{}", outcome.summary);
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("pinchlab: {e}");
            ExitCode::from(exit_byte(&e))
        }
    }
}

fn exit_byte(e: &CliError) -> u8 {
    e.exit_code() as u8
}
