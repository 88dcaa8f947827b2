//! Drive the experiment layer from an in-memory config and read the
//! written files back. The same commands are available from the `eda-lab`
//! binary with `--config <file>`.
//!
//! $ cargo run -p eda-lab --example experiment_files [out-dir]

use eda_lab::experiment::output::{read_csv, Metadata, TrajectoryRow};
use eda_lab::experiment::{cmd_bounds, cmd_compare, cmd_dynamics, cmd_simulate, ExperimentConfig, ExperimentError};

const CONFIG: &str = r#"
[problem]
kind = "onemax"
bits = 6

[selection]
selection = "truncation"
mu = 0.5

[simulation]
population_size = 2000
replications = 10
seed = 7

[bounds]
d0 = [0.5, 0.9, 0.984375]
mu = [0.25, 0.5, 0.75]

[output]
format = "csv"
"#;

fn main() -> Result<(), ExperimentError> {
    let out = std::env::args().nth(1).unwrap_or_else(|| "eda-lab-out/example".into());
    let config = ExperimentConfig::from_toml_str(CONFIG)?.with_overrides(Some(out.into()), None, None);
    println!("config sha256 {}", config.hash());

    for cmd in [cmd_dynamics, cmd_bounds, cmd_simulate, cmd_compare] {
        let outcome = cmd(&config)?;
        println!("{}", outcome.summary);
        for f in &outcome.files {
            println!("  wrote {}", f.display());
        }
    }

    let (meta, rows): (Metadata, Vec<TrajectoryRow>) = read_csv(&config.output.dir.join("trajectory.csv"))?;
    println!("trajectory.csv from {} {}: {} rows, last d = {}", meta.tool, meta.version, rows.len(), rows.last().unwrap().d);
    Ok(())
}
