//! Experiment reports and their JSON/CSV encodings.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stats::{RatioEstimate, Summary};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub config_hash: String,
    pub seed: u64,
    pub code_version: String,
    /// Seconds since the Unix epoch, only when the config asks for it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<u64>,
}

/// One point of a curve; `analytic_value` is absent when no closed form applies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub series: String,
    pub parameter: f64,
    pub analytic_value: Option<f64>,
    pub simulated_value: f64,
    pub ci_halfwidth: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleRecord {
    pub index: usize,
    pub seed: u64,
    pub nodes: usize,
    pub greedy: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub baseline: Option<f64>,
    pub rounds: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrEstimate {
    pub baseline: String,
    /// Mean greedy total over mean baseline total.
    pub ratio_of_means: RatioEstimate,
    pub mean_of_ratios: RatioEstimate,
    /// Closed-form lower bound for this family and weight model, when known.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub analytic_lower_bound: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundsAtSize {
    pub nodes: usize,
    pub rounds: Summary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundsReport {
    pub sizes: Vec<RoundsAtSize>,
    /// Fit of mean rounds to `intercept + log_slope ln n`.
    pub intercept: f64,
    pub log_slope: f64,
    pub r_squared: f64,
    /// Slope of mean rounds against `n` itself.
    pub linear_slope: f64,
    /// Mean rounds over `n` falls strictly along the size grid.
    pub rounds_per_node_decreasing: bool,
    /// `d < 2 / max p_k` for `G(n, d/n)`; absent for other families.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub applicability_holds: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub metadata: Metadata,
    pub metrics: BTreeMap<String, Summary>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pr: Option<PrEstimate>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rounds: Option<RoundsReport>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub curves: Vec<CurvePoint>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub records: Option<Vec<SampleRecord>>,
}

impl ExperimentReport {
    pub fn new(name: Option<String>, metadata: Metadata) -> Self {
        ExperimentReport {
            name,
            metadata,
            metrics: BTreeMap::new(),
            pr: None,
            rounds: None,
            curves: Vec::new(),
            warnings: Vec::new(),
            records: None,
        }
    }

    /// Points of one series, in insertion order.
    pub fn series(&self, name: &str) -> Vec<&CurvePoint> {
        self.curves.iter().filter(|c| c.series == name).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json() + "\n").map_err(|e| Error::io(path, e))
    }

    /// Curve data as `series,parameter,analytic_value,simulated_value,ci_halfwidth`.
    pub fn curves_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["series", "parameter", "analytic_value", "simulated_value", "ci_halfwidth"])?;
        for c in &self.curves {
            let fmt = |x: f64| if x.is_nan() { String::new() } else { x.to_string() };
            w.write_record([
                c.series.clone(),
                c.parameter.to_string(),
                c.analytic_value.map(fmt).unwrap_or_default(),
                fmt(c.simulated_value),
                fmt(c.ci_halfwidth),
            ])?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Config(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv is utf-8"))
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let text = self.curves_csv()?;
        let mut f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        f.write_all(text.as_bytes()).map_err(|e| Error::io(path, e))
    }
}
