//! Scenario configuration: defaults, key-value config files, and flag
//! overrides, resolved into one validated struct that is embedded in
//! every report.

use std::fmt;
use std::path::{Path, PathBuf};

use num_complex::Complex64;

use crate::CliError;

/// The experiment selected on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    NoGo,
    Moments,
    Collapse,
    Interference,
    Decoherence,
}

impl Scenario {
    pub fn parse(s: &str) -> Result<Self, CliError> {
        match s {
            "nogo" => Ok(Scenario::NoGo),
            "moments" => Ok(Scenario::Moments),
            "collapse" => Ok(Scenario::Collapse),
            "interference" => Ok(Scenario::Interference),
            "decoherence" => Ok(Scenario::Decoherence),
            other => Err(CliError::Config(format!(
                "unknown scenario {other:?} (expected nogo, moments, collapse, interference or decoherence)"
            ))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Scenario::NoGo => "nogo",
            Scenario::Moments => "moments",
            Scenario::Collapse => "collapse",
            Scenario::Interference => "interference",
            Scenario::Decoherence => "decoherence",
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Environment branch-state rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OverlapModel {
    Fixed(f64),
    Haar,
}

impl OverlapModel {
    pub fn parse(s: &str) -> Result<Self, CliError> {
        if s == "haar" {
            return Ok(OverlapModel::Haar);
        }
        if let Some(value) = s.strip_prefix("fixed:") {
            let v: f64 = value
                .parse()
                .map_err(|_| CliError::Config(format!("bad overlap value {value:?}")))?;
            if !(-1.0..=1.0).contains(&v) {
                return Err(CliError::Config(format!(
                    "overlap {v} outside [-1, 1]"
                )));
            }
            return Ok(OverlapModel::Fixed(v));
        }
        Err(CliError::Config(format!(
            "unknown overlap model {s:?} (expected fixed:<value> or haar)"
        )))
    }

    pub fn describe(&self) -> String {
        match self {
            OverlapModel::Fixed(v) => format!("fixed:{v}"),
            OverlapModel::Haar => "haar".to_string(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Structured,
    Csv,
    Both,
}

impl OutputFormat {
    pub fn parse(s: &str) -> Result<Self, CliError> {
        match s {
            "structured" => Ok(OutputFormat::Structured),
            "csv" => Ok(OutputFormat::Csv),
            "both" => Ok(OutputFormat::Both),
            other => Err(CliError::Config(format!(
                "unknown format {other:?} (expected structured, csv or both)"
            ))),
        }
    }

    pub fn wants_structured(&self) -> bool {
        matches!(self, OutputFormat::Structured | OutputFormat::Both)
    }

    pub fn wants_csv(&self) -> bool {
        matches!(self, OutputFormat::Csv | OutputFormat::Both)
    }
}

/// Unresolved options; `None` means "not given at this layer".
/// Merging picks the higher-precedence layer per field
/// (flags > file > defaults).
#[derive(Debug, Clone, Default)]
pub struct RawConfig {
    pub scenario: Option<String>,
    pub a1: Option<(f64, f64)>,
    pub a2: Option<(f64, f64)>,
    pub q: Option<(f64, f64)>,
    pub env_qubits: Option<usize>,
    pub overlap: Option<String>,
    pub events: Option<usize>,
    pub moments: Option<u32>,
    pub alpha: Option<f64>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub format: Option<String>,
}

impl RawConfig {
    /// Fields of `self` win over `base`.
    pub fn over(self, base: RawConfig) -> RawConfig {
        RawConfig {
            scenario: self.scenario.or(base.scenario),
            a1: self.a1.or(base.a1),
            a2: self.a2.or(base.a2),
            q: self.q.or(base.q),
            env_qubits: self.env_qubits.or(base.env_qubits),
            overlap: self.overlap.or(base.overlap),
            events: self.events.or(base.events),
            moments: self.moments.or(base.moments),
            alpha: self.alpha.or(base.alpha),
            seed: self.seed.or(base.seed),
            out: self.out.or(base.out),
            format: self.format.or(base.format),
        }
    }

    /// Parses a `key = value` config file; keys are the flag names.
    pub fn from_file(path: &Path) -> Result<RawConfig, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("reading {}: {e}", path.display())))?;
        let mut cfg = RawConfig::default();
        for (lineno, raw_line) in text.lines().enumerate() {
            let line = raw_line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::Config(format!(
                    "{}:{}: expected key = value",
                    path.display(),
                    lineno + 1
                ))
            })?;
            let key = key.trim();
            let value = value.trim();
            let bad = |what: &str| {
                CliError::Config(format!(
                    "{}:{}: bad {what} value {value:?}",
                    path.display(),
                    lineno + 1
                ))
            };
            match key {
                "scenario" => cfg.scenario = Some(value.to_string()),
                "a1" => cfg.a1 = Some(parse_pair(value).map_err(|_| bad("a1"))?),
                "a2" => cfg.a2 = Some(parse_pair(value).map_err(|_| bad("a2"))?),
                "q" => cfg.q = Some(parse_pair(value).map_err(|_| bad("q"))?),
                "env-qubits" => {
                    cfg.env_qubits = Some(value.parse().map_err(|_| bad("env-qubits"))?)
                }
                "overlap" => cfg.overlap = Some(value.to_string()),
                "events" => cfg.events = Some(value.parse().map_err(|_| bad("events"))?),
                "moments" => cfg.moments = Some(value.parse().map_err(|_| bad("moments"))?),
                "alpha" => cfg.alpha = Some(value.parse().map_err(|_| bad("alpha"))?),
                "seed" => cfg.seed = Some(value.parse().map_err(|_| bad("seed"))?),
                "out" => cfg.out = Some(PathBuf::from(value)),
                "format" => cfg.format = Some(value.to_string()),
                other => {
                    return Err(CliError::Config(format!(
                        "{}:{}: unknown key {other:?}",
                        path.display(),
                        lineno + 1
                    )))
                }
            }
        }
        Ok(cfg)
    }
}

/// Parses `re,im` (or a bare real) into a complex pair.
pub fn parse_pair(s: &str) -> Result<(f64, f64), String> {
    let mut parts = s.split(',').map(str::trim);
    let first = parts
        .next()
        .filter(|p| !p.is_empty())
        .ok_or_else(|| format!("empty pair {s:?}"))?;
    let re: f64 = first.parse().map_err(|_| format!("bad number {first:?}"))?;
    let im = match parts.next() {
        None => 0.0,
        Some(p) => p.parse().map_err(|_| format!("bad number {p:?}"))?,
    };
    if parts.next().is_some() {
        return Err(format!("too many components in {s:?}"));
    }
    Ok((re, im))
}

/// Fully resolved configuration; this is what scenarios run from and
/// what reports embed.
#[derive(Debug, Clone)]
pub struct ScenarioConfig {
    pub scenario: Scenario,
    pub a1: Complex64,
    pub a2: Complex64,
    pub q: (f64, f64),
    pub env_qubits: usize,
    pub overlap: OverlapModel,
    pub events: usize,
    pub moments: u32,
    pub alpha: f64,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub format: OutputFormat,
}

/// Amplitude deviations below this are normalized away silently.
const SILENT_NORM_TOL: f64 = 1e-12;
/// Deviations up to this are auto-normalized with a warning; anything
/// larger is a configuration error.
const NORMALIZE_LIMIT: f64 = 1e-2;

/// Applies defaults, validates, and auto-normalizes the amplitudes.
/// Returns the resolved config plus any warnings (sent to stderr by the
/// binary so report payloads stay byte-identical).
pub fn resolve(raw: RawConfig) -> Result<(ScenarioConfig, Vec<String>), CliError> {
    let mut warnings = Vec::new();

    let scenario = Scenario::parse(
        raw.scenario
            .as_deref()
            .ok_or_else(|| CliError::Config("no scenario given (use --scenario)".into()))?,
    )?;

    let r = 1.0 / 2.0_f64.sqrt();
    let (a1re, a1im) = raw.a1.unwrap_or((r, 0.0));
    let (a2re, a2im) = raw.a2.unwrap_or((r, 0.0));
    let mut a1 = Complex64::new(a1re, a1im);
    let mut a2 = Complex64::new(a2re, a2im);
    let norm = (a1.norm_sqr() + a2.norm_sqr()).sqrt();
    let dev = (norm - 1.0).abs();
    if dev >= NORMALIZE_LIMIT || norm == 0.0 {
        return Err(CliError::Config(format!(
            "amplitudes are not normalizable: |a| = {norm:.6}"
        )));
    }
    if dev > 0.0 {
        a1 /= norm;
        a2 /= norm;
        if dev > SILENT_NORM_TOL {
            warnings.push(format!(
                "amplitudes off normalization by {dev:.3e}; rescaled"
            ));
        }
    }

    let q = raw.q.unwrap_or((1.0, -1.0));
    if q.0 == q.1 {
        return Err(CliError::Config(
            "pointer eigenvalues q1 and q2 must differ".into(),
        ));
    }

    let overlap = match raw.overlap.as_deref() {
        None => OverlapModel::Haar,
        Some(s) => OverlapModel::parse(s)?,
    };

    let events = raw.events.unwrap_or(100_000);
    if events == 0 {
        return Err(CliError::Config("events must be at least 1".into()));
    }
    let moments = raw.moments.unwrap_or(4);
    if moments == 0 {
        return Err(CliError::Config("moments order must be at least 1".into()));
    }
    let alpha = raw.alpha.unwrap_or(0.05);
    if !(0.0 < alpha && alpha < 1.0) {
        return Err(CliError::Config(format!(
            "alpha must lie strictly between 0 and 1, got {alpha}"
        )));
    }

    let format = match raw.format.as_deref() {
        None => OutputFormat::Structured,
        Some(s) => OutputFormat::parse(s)?,
    };
    if format.wants_csv() && raw.out.is_none() {
        return Err(CliError::Config(
            "csv output requires --out to derive the sidecar path".into(),
        ));
    }

    Ok((
        ScenarioConfig {
            scenario,
            a1,
            a2,
            q,
            env_qubits: raw.env_qubits.unwrap_or(4),
            overlap,
            events,
            moments,
            alpha,
            seed: raw.seed.unwrap_or(42),
            out: raw.out,
            format,
        },
        warnings,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_resolve() {
        let raw = RawConfig {
            scenario: Some("nogo".into()),
            ..Default::default()
        };
        let (cfg, warnings) = resolve(raw).unwrap();
        assert_eq!(cfg.scenario, Scenario::NoGo);
        assert_eq!(cfg.seed, 42);
        assert_eq!(cfg.events, 100_000);
        assert!(warnings.is_empty());
        assert!((cfg.a1.norm_sqr() + cfg.a2.norm_sqr() - 1.0).abs() < 1e-15);
    }

    #[test]
    // A four-digit 1/sqrt(2) is the point of this test.
    #[allow(clippy::approx_constant)]
    fn four_digit_root_two_is_accepted_with_warning() {
        let raw = RawConfig {
            scenario: Some("nogo".into()),
            a1: Some((0.7071, 0.0)),
            a2: Some((0.7071, 0.0)),
            ..Default::default()
        };
        let (cfg, warnings) = resolve(raw).unwrap();
        assert_eq!(warnings.len(), 1);
        assert!((cfg.a1.norm_sqr() + cfg.a2.norm_sqr() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn garbage_amplitudes_rejected() {
        let raw = RawConfig {
            scenario: Some("nogo".into()),
            a1: Some((1.0, 0.0)),
            a2: Some((1.0, 0.0)),
            ..Default::default()
        };
        assert!(matches!(resolve(raw), Err(CliError::Config(_))));
    }

    #[test]
    fn flag_overrides_file() {
        let file = RawConfig {
            scenario: Some("moments".into()),
            seed: Some(1),
            events: Some(10),
            ..Default::default()
        };
        let flags = RawConfig {
            seed: Some(2),
            ..Default::default()
        };
        let merged = flags.over(file);
        assert_eq!(merged.seed, Some(2));
        assert_eq!(merged.events, Some(10));
        assert_eq!(merged.scenario.as_deref(), Some("moments"));
    }

    #[test]
    fn pair_parsing() {
        assert_eq!(parse_pair("0.6,0.8").unwrap(), (0.6, 0.8));
        assert_eq!(parse_pair("0.6").unwrap(), (0.6, 0.0));
        assert_eq!(parse_pair(" 1 , -1 ").unwrap(), (1.0, -1.0));
        assert!(parse_pair("a,b").is_err());
        assert!(parse_pair("1,2,3").is_err());
    }

    #[test]
    fn csv_without_out_is_config_error() {
        let raw = RawConfig {
            scenario: Some("nogo".into()),
            format: Some("csv".into()),
            ..Default::default()
        };
        assert!(matches!(resolve(raw), Err(CliError::Config(_))));
    }
}
