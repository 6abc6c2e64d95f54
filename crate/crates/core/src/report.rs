//! Machine-readable verification reports: a flat namespace of thresholded
//! metrics plus the normalized configuration that produced them, serialized
//! as a single JSON document, with CSV emission for convergence sweeps.
//!
//! Every metric carries its threshold, the comparison direction, and a
//! pass/fail/indeterminate state — expected-failure checks are expressed as
//! `at_least` metrics (the defect must exceed the threshold), so "the failure
//! was detected" and "the bound holds" read identically in a report.
//!
//! Reports are deterministic for a fixed configuration and seed apart from
//! wall-clock timings; [`VerificationReport::canonical_bytes`] strips the
//! timing block and is byte-stable across identical runs.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{ModelError, Result};

/// Version of the report document layout.
pub const SCHEMA_VERSION: u32 = 1;

/// Outcome state of one metric or of a whole report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricState {
    Pass,
    Fail,
    /// Neither margin of the margin-with-trend protocol was met; counts as
    /// not-passed everywhere.
    Indeterminate,
}

/// Which side of the threshold counts as a pass.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// Pass iff value ≤ threshold (defects, residuals, leakages).
    AtMost,
    /// Pass iff value ≥ threshold (expected failures, separation margins).
    AtLeast,
}

/// One measured value against its threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metric {
    pub value: f64,
    pub threshold: f64,
    pub direction: Direction,
    pub state: MetricState,
}

impl Metric {
    fn check_finite(value: f64, threshold: f64) {
        assert!(
            value.is_finite() && threshold.is_finite(),
            "metrics must be finite to serialize losslessly (value {value}, threshold {threshold})"
        );
    }

    /// A bound that holds when the value stays at or below the threshold.
    pub fn at_most(value: f64, threshold: f64) -> Self {
        Self::check_finite(value, threshold);
        Self {
            value,
            threshold,
            direction: Direction::AtMost,
            state: if value <= threshold { MetricState::Pass } else { MetricState::Fail },
        }
    }

    /// A bound that holds when the value reaches at least the threshold
    /// (expected-failure detections and separation margins).
    pub fn at_least(value: f64, threshold: f64) -> Self {
        Self::check_finite(value, threshold);
        Self {
            value,
            threshold,
            direction: Direction::AtLeast,
            state: if value >= threshold { MetricState::Pass } else { MetricState::Fail },
        }
    }

    /// A measurement whose margin-with-trend protocol reached no verdict.
    pub fn indeterminate(value: f64, threshold: f64, direction: Direction) -> Self {
        Self::check_finite(value, threshold);
        Self { value, threshold, direction, state: MetricState::Indeterminate }
    }

    pub fn passed(&self) -> bool {
        self.state == MetricState::Pass
    }
}

/// A single verification run: case id, normalized config snapshot, flat
/// `module.check.metric` namespace, overall verdict, and timings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub schema_version: u32,
    pub artifact_version: String,
    pub case: String,
    /// Normalized configuration, flattened to `section.key` → value strings.
    pub config: BTreeMap<String, String>,
    /// Flat metric namespace `module.check.metric`.
    pub metrics: BTreeMap<String, Metric>,
    /// Wall-clock seconds per named stage; excluded from canonical bytes.
    pub timings: BTreeMap<String, f64>,
}

impl VerificationReport {
    pub fn new(case: impl Into<String>, artifact_version: impl Into<String>) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            artifact_version: artifact_version.into(),
            case: case.into(),
            config: BTreeMap::new(),
            metrics: BTreeMap::new(),
            timings: BTreeMap::new(),
        }
    }

    /// Record one normalized config entry (`section.key` form).
    pub fn set_config(&mut self, key: impl Into<String>, value: impl Into<String>) {
        self.config.insert(key.into(), value.into());
    }

    /// Insert a metric under a dotted `module.check.metric` name.
    pub fn insert(&mut self, name: impl Into<String>, metric: Metric) {
        let name = name.into();
        debug_assert!(
            name.split('.').count() >= 2 && name.split('.').all(|part| !part.is_empty()),
            "metric names are dotted module.check.metric paths, got {name:?}"
        );
        self.metrics.insert(name, metric);
    }

    pub fn record_timing(&mut self, name: impl Into<String>, seconds: f64) {
        self.timings.insert(name.into(), seconds);
    }

    /// True iff every metric passed (indeterminate counts as not passed).
    pub fn passed(&self) -> bool {
        !self.metrics.is_empty() && self.metrics.values().all(Metric::passed)
    }

    /// Names of the metrics that did not pass, in namespace order.
    pub fn failures(&self) -> Vec<&str> {
        self.metrics
            .iter()
            .filter(|(_, m)| !m.passed())
            .map(|(name, _)| name.as_str())
            .collect()
    }

    /// Pretty-printed JSON document (deterministic key order).
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail") + "\n"
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text)
            .map_err(|e| ModelError::Config(format!("unreadable report document: {e}")))
    }

    /// The byte-stable form: the full document with the volatile timing block
    /// emptied. Two runs with identical config and seed produce identical
    /// canonical bytes.
    pub fn canonical_bytes(&self) -> Vec<u8> {
        let mut stripped = self.clone();
        stripped.timings.clear();
        stripped.to_json().into_bytes()
    }
}

/// A rectangular sweep table (one row per grid size or parameter value), for
/// CSV emission of convergence data and plot columns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub case: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl SweepTable {
    pub fn new(case: impl Into<String>, columns: Vec<String>) -> Self {
        Self { case: case.into(), columns, rows: Vec::new() }
    }

    /// Append one row; must match the header width.
    pub fn push_row(&mut self, row: Vec<f64>) -> Result<()> {
        if row.len() != self.columns.len() {
            return Err(ModelError::Config(format!(
                "sweep row has {} values for {} columns",
                row.len(),
                self.columns.len()
            )));
        }
        if let Some(bad) = row.iter().find(|v| !v.is_finite()) {
            return Err(ModelError::Config(format!("non-finite sweep value {bad}")));
        }
        self.rows.push(row);
        Ok(())
    }

    /// Header line plus one line per row; floats in shortest round-trip form.
    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let line: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }

    /// True iff the named column strictly decreases down the rows.
    pub fn column_monotone_decreasing(&self, name: &str) -> Result<bool> {
        let idx = self
            .columns
            .iter()
            .position(|c| c == name)
            .ok_or_else(|| ModelError::Config(format!("no sweep column named {name:?}")))?;
        Ok(self.rows.windows(2).all(|w| w[1][idx] < w[0][idx]))
    }
}
