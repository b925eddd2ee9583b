use std::fs::File;
use std::io::{self, BufWriter};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use ris_antijam::config::ScenarioConfig;
use ris_antijam::harness::{load_scenario_over, run_sweep, Axis, HarnessError};
use ris_antijam::optimizer::Scheme;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Profile {
    Paper,
    Desk,
}

/// Sum-rate sweeps for a self-sustainable active RIS under jamming.
#[derive(Debug, Parser)]
#[command(version)]
struct Args {
    /// Scenario file with `key = value` lines applied over the profile.
    #[arg(long)]
    scenario: Option<PathBuf>,
    /// active, passive, no-ris or all.
    #[arg(long, default_value = "all")]
    scheme: String,
    /// M, e_mse, p_max_dbm, alpha_r, B or iterations. Without it a single
    /// point at the configured scenario is run.
    #[arg(long)]
    sweep: Option<String>,
    /// Comma-separated axis values.
    #[arg(long, value_delimiter = ',')]
    values: Option<Vec<f64>>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// CSV destination; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "paper")]
    profile: Profile,
}

fn run(args: Args) -> Result<(), Box<dyn std::error::Error>> {
    let base = match args.profile {
        Profile::Paper => ScenarioConfig::paper(),
        Profile::Desk => ScenarioConfig::desk(),
    };
    let mut cfg = match &args.scenario {
        Some(path) => load_scenario_over(path, base)?,
        None => base,
    };
    if let Some(t) = args.trials {
        cfg.trials = t;
    }
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    cfg.validate().map_err(HarnessError::Validation)?;

    let schemes: Vec<Scheme> =
        if args.scheme.eq_ignore_ascii_case("all") { Scheme::ALL.to_vec() } else { vec![args.scheme.parse::<Scheme>()?] };
    let (axis, values) = match &args.sweep {
        Some(name) => {
            let axis: Axis = name.parse()?;
            let values = args.values.clone().unwrap_or_else(|| axis.default_values());
            (axis, values)
        }
        None => (Axis::M, vec![cfg.m as f64]),
    };

    let result = run_sweep(&cfg, axis, &values, &schemes)?;
    for (v, t) in result.values.iter().zip(&result.elapsed) {
        eprintln!("{axis} = {v}: {:.2} s", t.as_secs_f64());
    }
    match &args.out {
        Some(path) => result.write_csv(BufWriter::new(File::create(path)?))?,
        None => result.write_csv(io::stdout().lock())?,
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Args::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
