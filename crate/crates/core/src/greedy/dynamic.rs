//! Interval-based dynamic market.
//!
//! Time advances in whole minutes. Each minute `floor(lambda)` users arrive,
//! plus one more with probability `frac(lambda)`, at uniform positions on the
//! disk; each stays for an exponential(`mu`) lifetime. At every multiple `e`
//! of the interval `T` the epoch's participants are the users who arrived in
//! minutes `e - T .. e - 1` and are still present, together with the previous
//! epoch's participants that are still present and, independently with
//! probability `gamma`, willing to continue. Unwilling users leave the market
//! for good. Participants are matched greedily on the geometric graph of
//! range `L`.

use rand::Rng as _;
use rand_distr::{Distribution, Exp};
use serde::{Deserialize, Serialize};

use super::greedy_match;
use crate::error::{Error, Result};
use crate::graph::generators::{geometric_over, sample_disk};
use crate::graph::WeightSource;
use crate::rng::rng_from_seed;
use crate::weights::WeightModel;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DynamicParams {
    pub lambda: f64,
    pub mu: f64,
    pub gamma: f64,
    pub interval: u32,
    pub range: f64,
    pub radius: f64,
    pub horizon: u32,
    /// Epochs before this minute are excluded from the averages.
    pub warmup: u32,
    pub weights: WeightModel,
}

impl DynamicParams {
    /// Warm-up of `ceil(5 / mu)` minutes rounded up to a whole interval.
    pub fn new(lambda: f64, mu: f64, gamma: f64, interval: u32, range: f64, radius: f64, horizon: u32, weights: WeightModel) -> Self {
        let t = interval.max(1);
        let raw = (5.0 / mu).ceil().clamp(0.0, u32::MAX as f64) as u32;
        let warmup = raw.div_ceil(t).saturating_mul(t);
        DynamicParams {
            lambda,
            mu,
            gamma,
            interval,
            range,
            radius,
            horizon,
            warmup,
            weights,
        }
    }

    fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return bad(format!("arrival rate must be > 0, got {}", self.lambda));
        }
        if !(self.mu > 0.0) {
            return bad(format!("departure rate must be > 0, got {}", self.mu));
        }
        if !(0.0..1.0).contains(&self.gamma) {
            return bad(format!("retention probability must be in [0, 1), got {}", self.gamma));
        }
        if self.interval == 0 {
            return bad("interval must be at least one minute".into());
        }
        if !(self.range > 0.0 && self.radius > 0.0) {
            return bad(format!("need L > 0 and R > 0, got L = {}, R = {}", self.range, self.radius));
        }
        if (self.horizon as f64) < 3.0 / self.mu {
            return bad(format!("horizon {} is shorter than 3 mean lifetimes", self.horizon));
        }
        if self.horizon < self.warmup.saturating_add(self.interval) {
            return bad(format!(
                "horizon {} leaves no epoch after the {}-minute warm-up",
                self.horizon, self.warmup
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub minute: u32,
    pub participants: usize,
    pub matched_weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DynamicSeries {
    /// Matched weight realised in each minute (non-zero only at epochs).
    pub per_minute_weight: Vec<f64>,
    pub epochs: Vec<EpochRecord>,
    /// Post-warm-up matched weight per minute.
    pub time_average_weight: f64,
    /// Post-warm-up mean participant count per epoch.
    pub mean_participants: f64,
}

#[derive(Clone, Copy)]
struct User {
    pos: [f64; 2],
    departs: f64,
}

pub fn run_dynamic(params: &DynamicParams, seed: u64) -> Result<DynamicSeries> {
    params.validate()?;
    let mut rng = rng_from_seed(seed);
    let lifetime = Exp::new(params.mu).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let whole = params.lambda.floor() as usize;
    let frac = params.lambda - params.lambda.floor();
    let source = WeightSource::Model {
        model: params.weights.clone(),
    };

    let mut window: Vec<User> = Vec::new();
    let mut participants: Vec<User> = Vec::new();
    let mut per_minute = vec![0.0; params.horizon as usize];
    let mut epochs = Vec::new();

    for minute in 0..params.horizon {
        let e = minute as f64;
        if minute > 0 && minute % params.interval == 0 {
            let mut next: Vec<User> = participants
                .iter()
                .copied()
                .filter(|u| u.departs > e && rng.random::<f64>() < params.gamma)
                .collect();
            next.extend(window.drain(..).filter(|u| u.departs > e));
            let coords = next.iter().map(|u| u.pos).collect();
            let weight = if next.len() >= 2 {
                let g = geometric_over(coords, None, params.range, &source, &mut rng)?;
                greedy_match(&g).total_weight
            } else {
                0.0
            };
            per_minute[minute as usize] = weight;
            epochs.push(EpochRecord {
                minute,
                participants: next.len(),
                matched_weight: weight,
            });
            participants = next;
        }
        let arrivals = whole + (rng.random::<f64>() < frac) as usize;
        for _ in 0..arrivals {
            let pos = sample_disk(params.radius, &mut rng);
            window.push(User {
                pos,
                departs: e + lifetime.sample(&mut rng),
            });
        }
    }

    let counted: Vec<&EpochRecord> = epochs.iter().filter(|r| r.minute >= params.warmup).collect();
    if counted.is_empty() {
        return Err(Error::InvalidParameter("no epoch falls after the warm-up".into()));
    }
    let total: f64 = counted.iter().map(|r| r.matched_weight).sum();
    let mean_participants = counted.iter().map(|r| r.participants as f64).sum::<f64>() / counted.len() as f64;
    Ok(DynamicSeries {
        per_minute_weight: per_minute,
        time_average_weight: total / (counted.len() as f64 * params.interval as f64),
        mean_participants,
        epochs,
    })
}
