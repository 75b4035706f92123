use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use qmeas_cli::config::{parse_pair, resolve, RawConfig};
use qmeas_cli::{execute, CliError};

/// Measurement-chain scenario runner: constructs the system-pointer
/// chain, applies the competing observer restrictions, and certifies the
/// feasibility and statistics claims as named checks in a structured
/// report.
#[derive(Parser, Debug)]
#[command(name = "qmeas", version, about, long_about = None)]
struct Args {
    /// Scenario: nogo | moments | collapse | interference | decoherence
    #[arg(long)]
    scenario: Option<String>,

    /// Optional key-value config file (same keys as the flags; flags win)
    #[arg(long)]
    config: Option<PathBuf>,

    /// First spin amplitude as re,im (default 1/sqrt(2))
    #[arg(long, value_parser = parse_pair_arg)]
    a1: Option<(f64, f64)>,

    /// Second spin amplitude as re,im (default 1/sqrt(2))
    #[arg(long, value_parser = parse_pair_arg)]
    a2: Option<(f64, f64)>,

    /// Pointer eigenvalues as q1,q2 (default 1,-1)
    #[arg(long, value_parser = parse_pair_arg)]
    q: Option<(f64, f64)>,

    /// Number of environment qubits (default 4)
    #[arg(long = "env-qubits")]
    env_qubits: Option<usize>,

    /// Environment overlap model: fixed:<value> or haar (default haar)
    #[arg(long)]
    overlap: Option<String>,

    /// Number of simulated events / trials (default 100000)
    #[arg(long)]
    events: Option<usize>,

    /// Highest moment order to report (default 4)
    #[arg(long)]
    moments: Option<u32>,

    /// Sequential-test confidence parameter in (0,1) (default 0.05)
    #[arg(long)]
    alpha: Option<f64>,

    /// Random seed (default 42)
    #[arg(long)]
    seed: Option<u64>,

    /// Report path; CSV sidecar derives from it. Omit to print to stdout
    #[arg(long)]
    out: Option<PathBuf>,

    /// Output format: structured | csv | both (default structured)
    #[arg(long)]
    format: Option<String>,
}

fn parse_pair_arg(s: &str) -> Result<(f64, f64), String> {
    parse_pair(s)
}

fn run(args: Args) -> Result<bool, CliError> {
    let flags = RawConfig {
        scenario: args.scenario,
        a1: args.a1,
        a2: args.a2,
        q: args.q,
        env_qubits: args.env_qubits,
        overlap: args.overlap,
        events: args.events,
        moments: args.moments,
        alpha: args.alpha,
        seed: args.seed,
        out: args.out,
        format: args.format,
    };
    let raw = match &args.config {
        Some(path) => flags.over(RawConfig::from_file(path)?),
        None => flags,
    };
    let (cfg, warnings) = resolve(raw)?;
    for w in warnings {
        eprintln!("warning: {w}");
    }
    let outcome = execute(&cfg)?;
    for path in &outcome.written {
        eprintln!("wrote {}", path.display());
    }
    if !outcome.all_passed {
        for check in outcome.report.checks.iter().filter(|c| !c.pass) {
            eprintln!(
                "check failed: {} (measured {}, expected {})",
                check.name, check.measured, check.expected
            );
        }
    }
    Ok(outcome.all_passed)
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(args) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(err) => {
            eprintln!("{err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
