use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use ibvp_cli::{parse_config_with, run, Mode, Overrides};

/// Solve, certify and sweep scalar conservation laws with time-dependent flux.
#[derive(Debug, Parser)]
#[command(name = "ibvp", version)]
struct Args {
    /// TOML run configuration.
    #[arg(long)]
    config: PathBuf,
    #[arg(long, value_enum)]
    mode: Option<Mode>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed for random certificate batches.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    cells: Option<usize>,
    #[arg(long)]
    cfl: Option<f64>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let over = Overrides {
        mode: args.mode,
        out: args.out,
        seed: args.seed,
        cells: args.cells,
        cfl: args.cfl,
    };
    match parse_config_with(&args.config, &over).and_then(|cfg| run(&cfg)) {
        Ok(summary) => {
            for p in summary.artifacts {
                println!("{}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{}", e.record());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
