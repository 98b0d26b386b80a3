//! Declarative experiment configuration, read from TOML or JSON.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::graph::{Family, GeneratorSpec, WeightSource};
use crate::greedy::TieRule;
use crate::weights::WeightModel;

/// SHA-256 of the compact JSON encoding, hex. Struct fields serialise in
/// declaration order, so equal values hash equally.
pub fn hash_json<T: Serialize + ?Sized>(value: &T) -> String {
    let canonical = serde_json::to_string(value).expect("value serialises");
    hex::encode(Sha256::digest(canonical.as_bytes()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    PrVsBound,
    PrVsExact,
    Rounds,
    PerUserWeight,
    FailureCurve,
    DynamicCurve,
    /// Per-user weight against mean degree on caching graphs, next to `G(n, d/n)`.
    CachingCurve,
    /// Performance ratio on `G(n, d/n)` across a grid of mean degrees.
    GnpCurve,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Baseline {
    Decomposition,
    NeighborMax,
    PathDp,
    TreeDp,
    Exhaustive,
    MultiunitBound,
}

impl Baseline {
    pub fn is_exact(self) -> bool {
        matches!(self, Baseline::PathDp | Baseline::TreeDp | Baseline::Exhaustive)
    }

    pub fn name(self) -> &'static str {
        match self {
            Baseline::Decomposition => "decomposition",
            Baseline::NeighborMax => "neighbor_max",
            Baseline::PathDp => "path_dp",
            Baseline::TreeDp => "tree_dp",
            Baseline::Exhaustive => "exhaustive",
            Baseline::MultiunitBound => "multiunit_bound",
        }
    }
}

/// Graph family and weight source; the seed comes from the experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphConfig {
    #[serde(flatten)]
    pub family: Family,
    pub weights: WeightSource,
}

impl GraphConfig {
    pub fn spec(&self, seed: u64) -> GeneratorSpec {
        GeneratorSpec {
            family: self.family.clone(),
            weights: self.weights.clone(),
            seed,
        }
    }

    pub fn family_name(&self) -> &'static str {
        match self.family {
            Family::Line { .. } => "line",
            Family::Grid2d { .. } => "grid2d",
            Family::Gnp { .. } => "gnp",
            Family::Geometric { .. } => "geometric",
            Family::Caching { .. } => "caching",
        }
    }

    pub fn model(&self) -> Option<&WeightModel> {
        match &self.weights {
            WeightSource::Model { model } => Some(model),
            WeightSource::Caches { .. } => None,
        }
    }
}

/// Per-node quantity distribution for multi-unit runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantityModel {
    pub values: Vec<u32>,
    /// Uniform when omitted.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probs: Option<Vec<f64>>,
}

impl QuantityModel {
    pub fn uniform(values: Vec<u32>) -> Self {
        QuantityModel { values, probs: None }
    }

    /// The same distribution as a [`WeightModel`] for sampling.
    pub fn as_model(&self) -> Result<WeightModel> {
        if self.values.contains(&0) {
            return Err(Error::Config("quantities must be >= 1".into()));
        }
        let mut pairs: Vec<(u32, f64)> = match &self.probs {
            Some(p) if p.len() == self.values.len() => self.values.iter().copied().zip(p.iter().copied()).collect(),
            Some(_) => return Err(Error::Config("quantity values and probs differ in length".into())),
            None => {
                let u = 1.0 / self.values.len() as f64;
                self.values.iter().map(|&v| (v, u)).collect()
            }
        };
        pairs.sort_by_key(|p| p.0);
        WeightModel::new(pairs.iter().map(|p| p.0 as f64).collect(), pairs.iter().map(|p| p.1).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CachingStudy {
    /// Location CSV; synthetic locations when omitted.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub locations: Option<PathBuf>,
    #[serde(default = "default_users")]
    pub users: usize,
    pub ranges: Vec<f64>,
    #[serde(default = "default_library")]
    pub library_size: usize,
    #[serde(default = "default_cache")]
    pub cache_size: usize,
}

fn default_users() -> usize {
    300
}
fn default_library() -> usize {
    10
}
fn default_cache() -> usize {
    3
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailureSweep {
    pub n: usize,
    pub radius: f64,
    pub ranges: Vec<f64>,
    pub delta1: f64,
    pub delta2: f64,
    /// Midpoint distance within which pairs interfere; the sharing range when omitted.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub interference_radius: Option<f64>,
    #[serde(default = "default_library")]
    pub library_size: usize,
    #[serde(default = "default_cache")]
    pub cache_size: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntervalSweep {
    pub lambda: f64,
    pub mus: Vec<f64>,
    pub gammas: Vec<f64>,
    pub intervals: Vec<u32>,
    pub range: f64,
    pub radius: f64,
    /// Simulated minutes after the warm-up.
    pub minutes: u32,
    pub weights: WeightModel,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GnpCurve {
    pub n: usize,
    pub degrees: Vec<f64>,
    pub weights: WeightModel,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub seed: u64,
    pub samples: usize,
    pub metrics: Vec<Metric>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub baseline: Option<Baseline>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub graph: Option<GraphConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quantities: Option<QuantityModel>,
    #[serde(default)]
    pub tie_rule: TieRule,
    /// Two-level weights `{1, 1 + delta}` swept over these values.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta_grid: Option<Vec<f64>>,
    /// Node counts for the round measurement.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sizes: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub caching: Option<CachingStudy>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failure: Option<FailureSweep>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dynamic: Option<IntervalSweep>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gnp_curve: Option<GnpCurve>,
    #[serde(default)]
    pub keep_records: bool,
    #[serde(default)]
    pub timestamp: bool,
}

impl ExperimentConfig {
    /// A sampling config over `graph` with no metrics yet.
    pub fn new(graph: GraphConfig, samples: usize, seed: u64) -> Self {
        ExperimentConfig {
            name: None,
            seed,
            samples,
            metrics: Vec::new(),
            baseline: None,
            graph: Some(graph),
            quantities: None,
            tie_rule: TieRule::default(),
            delta_grid: None,
            sizes: None,
            caching: None,
            failure: None,
            dynamic: None,
            gnp_curve: None,
            keep_records: false,
            timestamp: false,
        }
    }

    pub fn with_metric(mut self, metric: Metric) -> Self {
        self.metrics.push(metric);
        self
    }

    pub fn with_baseline(mut self, baseline: Baseline) -> Self {
        self.baseline = Some(baseline);
        self
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let config: ExperimentConfig = toml::from_str(text).map_err(|e| Error::Config(e.message().to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let config: ExperimentConfig = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    /// Reads JSON for a `.json` path and TOML otherwise.
    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        if path.extension().is_some_and(|e| e == "json") {
            Self::from_json(&text)
        } else {
            Self::from_toml(&text)
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serialises")
    }

    pub fn hash(&self) -> String {
        hash_json(self)
    }

    fn graph_for(&self, metric: Metric) -> Result<&GraphConfig> {
        self.graph
            .as_ref()
            .ok_or_else(|| Error::Config(format!("metric {metric:?} needs a [graph] section")))
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples == 0 {
            return Err(Error::Config("samples must be >= 1".into()));
        }
        if self.metrics.is_empty() {
            return Err(Error::Config("no metrics requested".into()));
        }
        if let Some(q) = &self.quantities {
            q.as_model()?;
        }
        for &metric in &self.metrics {
            match metric {
                Metric::PrVsBound | Metric::PrVsExact => {
                    let graph = self.graph_for(metric)?;
                    let baseline = self
                        .baseline
                        .ok_or_else(|| Error::Config(format!("metric {metric:?} needs a baseline")))?;
                    if (metric == Metric::PrVsExact) != baseline.is_exact() {
                        return Err(Error::Config(format!(
                            "baseline {} does not fit metric {metric:?}",
                            baseline.name()
                        )));
                    }
                    self.check_baseline(graph, baseline)?;
                    if let Some(grid) = &self.delta_grid {
                        if grid.is_empty() || grid.iter().any(|d| !(*d > 0.0)) {
                            return Err(Error::Config("delta_grid needs positive values".into()));
                        }
                        if graph.model().is_none() {
                            return Err(Error::Config("delta_grid needs model weights".into()));
                        }
                    }
                }
                Metric::PerUserWeight => {
                    self.graph_for(metric)?;
                }
                Metric::Rounds => {
                    let graph = self.graph_for(metric)?;
                    if !matches!(graph.family, Family::Line { .. } | Family::Grid2d { .. } | Family::Gnp { .. }) {
                        return Err(Error::Config(format!(
                            "round measurement supports line, grid2d and gnp, not {}",
                            graph.family_name()
                        )));
                    }
                    if graph.model().is_none() {
                        return Err(Error::Config("round measurement needs model weights".into()));
                    }
                    if self.sizes.as_ref().is_some_and(|s| s.is_empty()) {
                        return Err(Error::Config("sizes must be non-empty".into()));
                    }
                }
                Metric::CachingCurve => {
                    let c = self.section(&self.caching, "caching")?;
                    if c.ranges.is_empty() {
                        return Err(Error::Config("caching ranges must be non-empty".into()));
                    }
                }
                Metric::FailureCurve => {
                    let f = self.section(&self.failure, "failure")?;
                    if f.ranges.is_empty() {
                        return Err(Error::Config("failure ranges must be non-empty".into()));
                    }
                }
                Metric::DynamicCurve => {
                    let d = self.section(&self.dynamic, "dynamic")?;
                    if d.mus.is_empty() || d.gammas.is_empty() || d.intervals.is_empty() {
                        return Err(Error::Config("dynamic grids must be non-empty".into()));
                    }
                }
                Metric::GnpCurve => {
                    let g = self.section(&self.gnp_curve, "gnp_curve")?;
                    if g.degrees.is_empty() {
                        return Err(Error::Config("gnp_curve degrees must be non-empty".into()));
                    }
                }
            }
        }
        Ok(())
    }

    fn section<'a, T>(&self, s: &'a Option<T>, name: &str) -> Result<&'a T> {
        s.as_ref().ok_or_else(|| Error::Config(format!("missing [{name}] section")))
    }

    fn check_baseline(&self, graph: &GraphConfig, baseline: Baseline) -> Result<()> {
        let family = graph.family_name();
        let multiunit = self.quantities.is_some();
        let ok = match baseline {
            Baseline::PathDp | Baseline::Decomposition => family == "line" && !multiunit,
            Baseline::TreeDp => matches!(family, "line" | "gnp") && !multiunit,
            Baseline::NeighborMax => !multiunit,
            Baseline::MultiunitBound => multiunit,
            Baseline::Exhaustive => true,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!(
                "baseline {} is incompatible with {}{}",
                baseline.name(),
                if multiunit { "multi-unit " } else { "" },
                family
            )))
        }
    }
}
