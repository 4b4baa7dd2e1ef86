use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use stmm_sim::config::{parse_config, Scenario, SweepConfig};
use stmm_sim::{run_to_csv, SimError};

/// Link-level sweep harness for full-duplex back-reflection over a
/// space-time modulated reflecting surface.
#[derive(Debug, Parser)]
#[command(name = "stmm-sim", version, about)]
struct Cli {
    /// Scenario to run: reflection_loss | se_vs_bandwidth | se_vs_angle |
    /// drift | oracle_check
    scenario: Option<String>,

    /// JSON configuration file; omitted fields take the built-in defaults
    #[arg(long)]
    config: Option<PathBuf>,

    /// Run seed (overrides the config file)
    #[arg(long)]
    seed: Option<u64>,

    /// Output CSV path (overrides the config file; default stdout)
    #[arg(long)]
    out: Option<PathBuf>,

    /// Worker threads for the sweep pool (default: all cores)
    #[arg(long)]
    workers: Option<usize>,

    /// Write a JSON sidecar with the fully resolved config next to the CSV
    #[arg(long)]
    sidecar: bool,

    /// Print the default parameter set as JSON and exit
    #[arg(long)]
    print_defaults: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("stmm-sim: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(cli: &Cli) -> Result<(), SimError> {
    if cli.print_defaults {
        return print_defaults(cli);
    }
    let scenario: Scenario = cli
        .scenario
        .as_deref()
        .ok_or_else(|| SimError::Config("missing scenario argument".into()))?
        .parse()?;
    let cfg = match &cli.config {
        Some(path) => parse_config(&fs::read_to_string(path)?)?,
        None => SweepConfig::default(),
    };
    let mut resolved = cfg.resolve(scenario)?;
    if let Some(seed) = cli.seed {
        resolved.seed = seed;
    }
    if let Some(out) = &cli.out {
        resolved.output_path = Some(out.display().to_string());
    }

    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(w) = cli.workers {
        if w == 0 {
            return Err(SimError::Config("workers: must be at least 1".into()));
        }
        pool = pool.num_threads(w);
    }
    let pool = pool
        .build()
        .map_err(|e| SimError::Config(format!("workers: {e}")))?;
    let (bytes, failure) = pool.install(|| run_to_csv(&resolved))?;

    match &resolved.output_path {
        Some(path) => {
            fs::write(path, &bytes)?;
            if cli.sidecar {
                let sidecar = PathBuf::from(path).with_extension("meta.json");
                let json = serde_json::to_string_pretty(&resolved)
                    .map_err(|e| SimError::Config(format!("sidecar: {e}")))?;
                fs::write(sidecar, json)?;
            }
        }
        None => {
            std::io::stdout().write_all(&bytes)?;
        }
    }
    match failure {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

fn print_defaults(cli: &Cli) -> Result<(), SimError> {
    // with a scenario, dump that scenario's fully resolved defaults;
    // otherwise the reference parameter sweep for the loss figure
    let scenario = match cli.scenario.as_deref() {
        Some(s) => s.parse()?,
        None => Scenario::ReflectionLoss,
    };
    let resolved = SweepConfig::default().resolve(scenario)?;
    let json = serde_json::to_string_pretty(&resolved)
        .map_err(|e| SimError::Config(format!("defaults: {e}")))?;
    println!("{json}");
    Ok(())
}
