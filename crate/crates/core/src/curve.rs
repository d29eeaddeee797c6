//! Sampled correlation curves with provenance.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

/// How a number was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Analytic,
    Wick,
    MonteCarlo,
}

impl Provenance {
    pub fn as_str(self) -> &'static str {
        match self {
            Provenance::Analytic => "analytic",
            Provenance::Wick => "wick",
            Provenance::MonteCarlo => "mc",
        }
    }
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub u: f64,
    pub value: f64,
    pub std_error: Option<f64>,
    /// Set when the estimator has no expected mass in this bin.
    pub flagged: bool,
}

/// A sampled function `u ↦ K̃(u)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationCurve {
    pub provenance: Provenance,
    pub points: Vec<CurvePoint>,
    pub metadata: BTreeMap<String, String>,
}

impl CorrelationCurve {
    pub fn new(provenance: Provenance) -> Self {
        Self { provenance, points: Vec::new(), metadata: BTreeMap::new() }
    }

    pub fn with_meta(mut self, key: &str, value: impl ToString) -> Self {
        self.metadata.insert(key.to_string(), value.to_string());
        self
    }
}
