//! Machine-readable run records.
//!
//! A document captures everything needed to audit or re-render a run: input
//! digests, the effective configuration, and the per-test or per-scenario
//! results. Re-running with the same inputs and seed reproduces the document
//! byte for byte; wall-clock time lives in the single `timing` field so
//! consumers can strip it before comparing.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::bootstrap::{CalibrationKind, Multiplier, TestOutcome, VarianceMode};
use crate::error::{Error, Result};
use crate::simgen::{MethodSpec, ScenarioReport};
use crate::stats::StatisticKind;

/// What produced the document.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DocumentKind {
    Test,
    Simulate,
}

/// Digest of one input file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputDigest {
    pub role: String,
    pub path: String,
    pub sha256: String,
}

impl InputDigest {
    pub fn new(role: &str, path: String, bytes: &[u8]) -> Self {
        InputDigest {
            role: role.to_string(),
            path,
            sha256: sha256_hex(bytes),
        }
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    let mut out = String::with_capacity(64);
    for byte in digest {
        out.push_str(&format!("{byte:02x}"));
    }
    out
}

/// One calibrated test inside a battery.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestRecord {
    pub statistic: StatisticKind,
    pub value: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kn: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma_hat: Option<f64>,
    /// Human-oriented method identifier, e.g. `t1-wild-boot`.
    pub method: String,
    pub calibration: CalibrationKind,
    pub multiplier: Multiplier,
    pub variance_mode: VarianceMode,
    pub replicates: usize,
    pub seed: u64,
    pub p_value: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reject: Option<bool>,
    pub redraws: u64,
}

impl TestRecord {
    /// Flatten a test outcome; `alpha` adds the accept/reject verdict.
    pub fn from_outcome(outcome: &TestOutcome, alpha: Option<f64>) -> Self {
        let method = &outcome.method;
        let label = MethodSpec {
            statistic: outcome.statistic.kind,
            calibration: method.kind,
            multiplier: method.multiplier,
            variance_mode: method.variance_mode,
            label: None,
        }
        .label();
        TestRecord {
            statistic: outcome.statistic.kind,
            value: outcome.statistic.value,
            kn: outcome.statistic.kn,
            sigma_hat: outcome.statistic.sigma_hat,
            method: label,
            calibration: method.kind,
            multiplier: method.multiplier,
            variance_mode: method.variance_mode,
            replicates: method.replicates,
            seed: method.seed,
            p_value: outcome.p_value,
            reject: alpha.map(|a| outcome.p_value <= a),
            redraws: outcome.diagnostics.redraws,
        }
    }
}

/// Wall-clock cost; the only field allowed to differ between identical runs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
pub struct Timing {
    pub seconds: f64,
}

/// Self-describing record of one `test` or `simulate` run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResultDocument {
    pub kind: DocumentKind,
    pub inputs: Vec<InputDigest>,
    /// Echo of the effective configuration.
    pub config: serde_json::Value,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub tests: Vec<TestRecord>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub scenarios: Vec<ScenarioReport>,
    pub timing: Timing,
}

impl ResultDocument {
    pub fn to_json(&self) -> String {
        let mut text =
            serde_json::to_string_pretty(self).expect("document serialization cannot fail");
        text.push('\n');
        text
    }

    pub fn from_json(text: &str, source_name: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Data {
            source_name: source_name.to_string(),
            row: e.line(),
            column: e.column(),
            reason: e.to_string(),
        })
    }
}
