use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::Rng;

/// Discrete edge-weight distribution: support `v_1 < ... < v_K` with
/// probabilities `p_1..p_K`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawWeightModel", into = "RawWeightModel")]
pub struct WeightModel {
    values: Vec<f64>,
    probs: Vec<f64>,
    cdf: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct RawWeightModel {
    values: Vec<f64>,
    probs: Vec<f64>,
}

impl TryFrom<RawWeightModel> for WeightModel {
    type Error = Error;
    fn try_from(raw: RawWeightModel) -> Result<Self> {
        WeightModel::new(raw.values, raw.probs)
    }
}

impl From<WeightModel> for RawWeightModel {
    fn from(m: WeightModel) -> Self {
        RawWeightModel {
            values: m.values,
            probs: m.probs,
        }
    }
}

const PROB_SUM_TOL: f64 = 1e-12;

impl WeightModel {
    pub fn new(values: Vec<f64>, probs: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidParameter("weight support is empty".into()));
        }
        if values.len() != probs.len() {
            return Err(Error::InvalidParameter(format!(
                "{} weight values but {} probabilities",
                values.len(),
                probs.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::InvalidParameter(
                "weight values must be finite and non-negative".into(),
            ));
        }
        if values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParameter(
                "weight values must be strictly increasing".into(),
            ));
        }
        if probs.iter().any(|p| !(*p > 0.0 && *p <= 1.0)) {
            return Err(Error::InvalidParameter(
                "probabilities must lie in (0, 1]".into(),
            ));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > PROB_SUM_TOL {
            return Err(Error::InvalidParameter(format!(
                "probabilities sum to {total}, not 1"
            )));
        }
        let mut acc = 0.0;
        let mut cdf: Vec<f64> = probs
            .iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect();
        *cdf.last_mut().expect("non-empty") = 1.0;
        Ok(WeightModel { values, probs, cdf })
    }

    /// Equal probability on every value.
    pub fn uniform(values: Vec<f64>) -> Result<Self> {
        let k = values.len().max(1);
        let probs = vec![1.0 / k as f64; values.len()];
        WeightModel::new(values, probs)
    }

    /// `{1, 1 + delta}` with equal probability.
    pub fn two_level(delta: f64) -> Result<Self> {
        WeightModel::uniform(vec![1.0, 1.0 + delta])
    }

    /// `K` evenly spaced values `1, 1 + step, ..., 1 + (K-1) step`, uniform.
    pub fn evenly_spaced(k: usize, step: f64) -> Result<Self> {
        WeightModel::uniform((0..k).map(|i| 1.0 + step * i as f64).collect())
    }

    pub fn k(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn value(&self, level: u16) -> f64 {
        self.values[level as usize]
    }

    pub fn max_value(&self) -> f64 {
        *self.values.last().expect("non-empty")
    }

    pub fn max_prob(&self) -> f64 {
        self.probs.iter().cloned().fold(0.0, f64::max)
    }

    /// `P(w <= v_{level})`, with `cumulative(-1) = 0` expressed as `cumulative_below(0)`.
    pub fn cumulative(&self, level: usize) -> f64 {
        self.cdf[level]
    }

    /// `P(w < v_{level})`.
    pub fn cumulative_below(&self, level: usize) -> f64 {
        if level == 0 {
            0.0
        } else {
            self.cdf[level - 1]
        }
    }

    pub fn is_uniform(&self) -> bool {
        let p0 = self.probs[0];
        self.probs.iter().all(|p| (p - p0).abs() <= 1e-12)
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().zip(&self.probs).map(|(v, p)| v * p).sum()
    }

    /// Index of `value` in the support, compared exactly.
    pub fn level_of(&self, value: f64) -> Option<u16> {
        self.values
            .iter()
            .position(|v| *v == value)
            .map(|i| i as u16)
    }

    pub fn sample_level(&self, rng: &mut Rng) -> u16 {
        if self.cdf.len() == 1 {
            return 0;
        }
        let u: f64 = rng.random();
        self.cdf.iter().position(|c| u < *c).unwrap_or(self.cdf.len() - 1) as u16
    }
}
