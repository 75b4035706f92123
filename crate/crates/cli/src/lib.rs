//! Scenario runner around the measurement-chain toolkit: resolves a
//! configuration from defaults, an optional key-value config file and
//! command-line flags, executes one experiment, and writes a structured
//! JSON report (plus a CSV sidecar for bulk event data).
//!
//! Exit codes: 0 all checks passed, 1 some check failed, 2 configuration
//! error, 3 I/O error.

use std::fmt;
use std::path::{Path, PathBuf};

pub mod config;
pub mod report;
pub mod scenario;

pub use config::{resolve, OutputFormat, RawConfig, Scenario, ScenarioConfig};
pub use report::{Check, Report};
pub use scenario::{run_scenario, ScenarioOutput};

/// Errors mapped onto distinct process exit codes.
#[derive(Debug, Clone)]
pub enum CliError {
    Config(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "configuration error: {msg}"),
            CliError::Io(msg) => write!(f, "i/o error: {msg}"),
        }
    }
}

impl std::error::Error for CliError {}

/// Everything a finished run produced.
pub struct RunOutcome {
    pub report: Report,
    pub all_passed: bool,
    /// Files written (report, then sidecar when requested).
    pub written: Vec<PathBuf>,
    /// The payload, for callers that want it without re-reading.
    pub payload: String,
}

/// Sidecar path: the report path with a `csv` extension.
pub fn csv_path(out: &Path) -> PathBuf {
    out.with_extension("csv")
}

/// Runs the scenario described by the resolved config and writes the
/// requested outputs. Without `--out`, the structured report goes to
/// stdout.
pub fn execute(cfg: &ScenarioConfig) -> Result<RunOutcome, CliError> {
    let output = run_scenario(cfg)?;
    let payload = output.report.to_json_string();
    let mut written = Vec::new();

    if cfg.format.wants_structured() {
        match &cfg.out {
            Some(path) => {
                std::fs::write(path, &payload)
                    .map_err(|e| CliError::Io(format!("writing {}: {e}", path.display())))?;
                written.push(path.clone());
            }
            None => print!("{payload}"),
        }
    }
    if cfg.format.wants_csv() {
        let out = cfg
            .out
            .as_ref()
            .expect("resolve() enforces --out for csv output");
        let path = csv_path(out);
        let csv = output.csv.clone().unwrap_or_else(|| {
            // Scenarios without bulk data export their checks table.
            let mut s = String::from("check,pass,measured,expected\n");
            for c in &output.report.checks {
                s.push_str(&format!(
                    "{},{},{},{}\n",
                    c.name, c.pass, c.measured, c.expected
                ));
            }
            s
        });
        std::fs::write(&path, csv)
            .map_err(|e| CliError::Io(format!("writing {}: {e}", path.display())))?;
        written.push(path);
    }

    let all_passed = output.report.all_passed();
    Ok(RunOutcome {
        all_passed,
        written,
        payload,
        report: output.report,
    })
}
