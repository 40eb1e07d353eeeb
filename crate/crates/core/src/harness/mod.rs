//! Verification engine: stratified samplers, empirical Lipschitz and
//! Hölder estimation, invariant suites and reproducible reports.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flow::FlowConfig;
use crate::norm::{Exponent, NormSpec};
use crate::retract::DEFAULT_TAU;
use crate::selector::SelectorConfig;

pub mod estimate;
pub mod maps;
pub mod report;
pub mod sample;
pub mod suites;

pub use estimate::{estimate_holder, estimate_lipschitz, Estimate, RatioRow};
pub use maps::MapId;
pub use report::{CheckRecord, Report};
pub use sample::{sample_fset, sample_pair, Stratum};
pub use suites::{suite_names, verify};

/// Everything a harness run depends on. Identical configs give
/// byte-identical reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub dim: usize,
    pub n: usize,
    pub p: Exponent,
    pub seed: u64,
    pub samples: usize,
    /// Half-width of the sampling box `[-scale, scale]^d`.
    pub scale: f64,
    pub map: String,
    pub tau: f64,
    pub selector: SelectorConfig,
    pub flow: FlowConfig,
    /// Per-check overrides of the default pass thresholds, keyed by check name.
    pub tolerances: BTreeMap<String, f64>,
    /// Measure wall time; off by default so reports stay reproducible.
    pub timing: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            dim: 2,
            n: 3,
            p: Exponent(2.0),
            seed: 42,
            samples: 1000,
            scale: 1.0,
            map: "identity".into(),
            tau: DEFAULT_TAU,
            selector: SelectorConfig::default(),
            flow: FlowConfig::default(),
            tolerances: BTreeMap::new(),
            timing: false,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        NormSpec::new(self.p.0, self.dim)?;
        if self.n == 0 {
            return Err(Error::Argument("n must be positive".into()));
        }
        if self.samples == 0 {
            return Err(Error::Argument("samples must be positive".into()));
        }
        if !(self.scale > 0.0 && self.scale.is_finite()) {
            return Err(Error::Argument(format!("scale must be positive, got {}", self.scale)));
        }
        if !(self.tau > 6.0) {
            return Err(Error::Argument(format!("tau must exceed 6, got {}", self.tau)));
        }
        self.selector.validate()?;
        self.flow.validate()
    }

    pub fn spec(&self) -> NormSpec {
        NormSpec::new(self.p.0, self.dim).expect("validated config")
    }

    /// Threshold for a check, honoring overrides.
    pub fn tolerance(&self, check: &str, default: f64) -> f64 {
        self.tolerances.get(check).copied().unwrap_or(default)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }
}
