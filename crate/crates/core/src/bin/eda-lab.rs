use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use eda_lab::experiment::{self, ExperimentConfig, ExperimentError, Format};

#[derive(Parser)]
#[command(name = "eda-lab", version, about = "Infinite-population EDA dynamics, stopping-time bounds and simulation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact dynamics trajectory plus a bound report.
    Dynamics(Args),
    /// Bounds and exact stopping times over the [bounds] grid.
    Bounds(Args),
    /// Finite-population Monte Carlo against the exact dynamics.
    Simulate(Args),
    /// All selection schemas side by side with their closed forms.
    Compare(Args),
}

#[derive(clap::Args)]
struct Args {
    /// Experiment config (TOML, or JSON when the name ends in .json).
    #[arg(long)]
    config: PathBuf,
    /// Overrides [output] dir.
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Overrides [simulation] seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides [output] format.
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

fn run(cli: Cli) -> Result<experiment::Outcome, ExperimentError> {
    let (args, cmd): (&Args, fn(&ExperimentConfig) -> experiment::Result<experiment::Outcome>) = match &cli.command {
        Command::Dynamics(a) => (a, experiment::cmd_dynamics),
        Command::Bounds(a) => (a, experiment::cmd_bounds),
        Command::Simulate(a) => (a, experiment::cmd_simulate),
        Command::Compare(a) => (a, experiment::cmd_compare),
    };
    let format = args.format.map(|f| match f {
        FormatArg::Csv => Format::Csv,
        FormatArg::Json => Format::Json,
    });
    let config = ExperimentConfig::load(&args.config)?.with_overrides(args.out_dir.clone(), args.seed, format);
    cmd(&config)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = std::env::var("EDA_LAB_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        // only fails if the pool already exists
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads.max(1)).build_global();
    }
    match run(cli) {
        Ok(outcome) => {
            println!("{}", outcome.summary);
            for f in &outcome.files {
                println!("wrote {}", f.display());
            }
            match outcome.not_converged {
                Some(msg) => {
                    eprintln!("eda-lab: not converged: {msg}");
                    ExitCode::from(3)
                }
                None => ExitCode::SUCCESS,
            }
        }
        Err(e) => {
            eprintln!("eda-lab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
