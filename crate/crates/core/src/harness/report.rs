//! Report records.

use serde::Serialize;

use super::RunConfig;

/// One check: `max_ratio` is the worst value of the check's statistic over
/// all instances and the check passes iff it does not exceed `threshold`.
/// A missing threshold marks a recorded, report-only quantity.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckRecord {
    pub name: String,
    pub anchor: String,
    pub samples: usize,
    pub max_ratio: f64,
    pub threshold: Option<f64>,
    pub witness: Option<serde_json::Value>,
    pub pass: bool,
}

impl CheckRecord {
    pub fn new(name: &str, anchor: &str, samples: usize, max_ratio: f64, threshold: Option<f64>, witness: Option<serde_json::Value>) -> Self {
        let pass = match threshold {
            Some(t) => max_ratio <= t,
            None => !max_ratio.is_nan(),
        };
        Self { name: name.into(), anchor: anchor.into(), samples, max_ratio, threshold, witness, pass }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub suite: String,
    pub anchors: Vec<String>,
    pub config: RunConfig,
    pub checks: Vec<CheckRecord>,
    pub runtime_ms: u64,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }
}
