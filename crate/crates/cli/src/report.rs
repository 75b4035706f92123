//! Structured report: one top-level object `{scenario, config, results,
//! checks}` where `checks` lists named assertions with measured and
//! expected values. The acceptance suite consumes `checks` directly;
//! CSV sidecars carry the bulk event data.

use serde::Serialize;
use serde_json::{json, Value};

use qmeas_core::linalg::CMatrix;
use qmeas_core::HermitianObservable;

use crate::config::ScenarioConfig;

/// One named assertion with its measured and expected values.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub measured: Value,
    pub expected: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
}

impl Check {
    /// |measured - expected| <= tolerance.
    pub fn close(name: &str, measured: f64, expected: f64, tolerance: f64) -> Check {
        Check {
            name: name.to_string(),
            pass: (measured - expected).abs() <= tolerance,
            measured: json!(measured),
            expected: json!(expected),
            tolerance: Some(tolerance),
        }
    }

    /// measured <= bound.
    pub fn below(name: &str, measured: f64, bound: f64) -> Check {
        Check {
            name: name.to_string(),
            pass: measured <= bound,
            measured: json!(measured),
            expected: json!(format!("<= {bound:e}")),
            tolerance: None,
        }
    }

    pub fn equals_usize(name: &str, measured: usize, expected: usize) -> Check {
        Check {
            name: name.to_string(),
            pass: measured == expected,
            measured: json!(measured),
            expected: json!(expected),
            tolerance: None,
        }
    }

    pub fn is_true(name: &str, measured: bool) -> Check {
        Check {
            name: name.to_string(),
            pass: measured,
            measured: json!(measured),
            expected: json!(true),
            tolerance: None,
        }
    }

    pub fn matches_str(name: &str, measured: &str, expected: &str) -> Check {
        Check {
            name: name.to_string(),
            pass: measured == expected,
            measured: json!(measured),
            expected: json!(expected),
            tolerance: None,
        }
    }
}

/// The verdict channel written as JSON.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub scenario: String,
    pub config: Value,
    pub results: Value,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn new(cfg: &ScenarioConfig, results: Value, checks: Vec<Check>) -> Report {
        Report {
            scenario: cfg.scenario.name().to_string(),
            config: config_json(cfg),
            results,
            checks,
        }
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    /// Serialized payload; identical config and seed give identical
    /// bytes (no timestamps, sorted object keys, stable float text).
    pub fn to_json_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serialization");
        s.push('\n');
        s
    }
}

/// The experiment parameters embedded for provenance. Output location
/// and format are delivery knobs, deliberately left out so payloads stay
/// byte-identical wherever they are written.
fn config_json(cfg: &ScenarioConfig) -> Value {
    json!({
        "scenario": cfg.scenario.name(),
        "a1": [cfg.a1.re, cfg.a1.im],
        "a2": [cfg.a2.re, cfg.a2.im],
        "q": [cfg.q.0, cfg.q.1],
        "env_qubits": cfg.env_qubits,
        "overlap": cfg.overlap.describe(),
        "events": cfg.events,
        "moments": cfg.moments,
        "alpha": cfg.alpha,
        "seed": cfg.seed,
    })
}

/// Row-major complex matrix as nested `[re, im]` pairs.
pub fn matrix_json(m: &CMatrix) -> Value {
    let rows: Vec<Value> = (0..m.rows())
        .map(|i| {
            let row: Vec<Value> = (0..m.cols())
                .map(|j| json!([m[(i, j)].re, m[(i, j)].im]))
                .collect();
            Value::Array(row)
        })
        .collect();
    Value::Array(rows)
}

pub fn observable_json(obs: &HermitianObservable) -> Value {
    matrix_json(obs.matrix())
}
