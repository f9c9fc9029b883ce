use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use dnlab::lab::{run_scenario, ScenarioConfig, ScenarioName};
use dnlab::LabError;

#[derive(Parser)]
#[command(name = "dnlab", version, about = "Run semilinear DN-map experiments from JSON configs")]
struct Cli {
    /// Print the scenario names and exit.
    #[arg(long)]
    list_scenarios: bool,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the scenario described by a config file.
    Run {
        config: PathBuf,
        /// Override the grid resolution (nodes per axis).
        #[arg(long)]
        grid: Option<usize>,
        /// Directory for CSV tables, summary.json and manifest.json.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        /// Parse and check the config without running it.
        #[arg(long)]
        validate_only: bool,
    },
}

fn run(config: PathBuf, grid: Option<usize>, out: Option<PathBuf>, seed: Option<u64>, validate_only: bool) -> Result<bool, LabError> {
    let mut cfg = ScenarioConfig::from_path(&config)?;
    if let Some(n) = grid {
        cfg.grid.n = n;
    }
    if let Some(s) = seed {
        cfg.seed = s;
    }
    if out.is_some() {
        cfg.output = out;
    }
    let valid = cfg.validate()?;
    if validate_only {
        println!("{}: config ok", cfg.scenario);
        return Ok(true);
    }
    let art = run_scenario(&valid)?;
    for a in &art.summary.assertions {
        let tag = if a.passed { "PASS" } else { "FAIL" };
        println!("[{tag}] {}: measured {:.6e}, bound {:.6e}", a.name, a.measured, a.bound);
    }
    if let Some(dir) = &art.output {
        println!("artifacts written to {}", dir.display());
    }
    Ok(art.summary.passed)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.list_scenarios {
        for n in ScenarioName::ALL {
            println!("{n}");
        }
        return ExitCode::SUCCESS;
    }
    let Some(Command::Run { config, grid, out, seed, validate_only }) = cli.command else {
        eprintln!("nothing to do; try `dnlab run <config>` or `dnlab --list-scenarios`");
        return ExitCode::from(2);
    };
    match run(config, grid, out, seed, validate_only) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_usage() { 2 } else { 1 })
        }
    }
}
