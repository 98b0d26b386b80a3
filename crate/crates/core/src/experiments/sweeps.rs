//! Parameter sweeps on location-driven graphs: caching case study, failures
//! against sharing range, and the matching interval of the dynamic market.

use super::config::{CachingStudy, FailureSweep, IntervalSweep};
use super::report::CurvePoint;
use crate::analytics::{expected_root_weight, steady_state_participants, RootWeightMode};
use crate::error::{Error, Result};
use crate::graph::{
    caching_weight_model, generate_geometric, generate_gnp, ingest_caching_instance, read_locations,
    synthetic_locations, WeightSource,
};
use crate::greedy::{greedy_match, greedy_with_failures, run_dynamic, DynamicParams};
use crate::rng::{derive_seed, run_samples};
use crate::stats::Summary;
use crate::weights::WeightModel;

/// Floors used for synthetic building locations.
pub const SYNTHETIC_FLOORS: usize = 3;

fn point(series: impl Into<String>, parameter: f64, analytic: Option<f64>, s: &Summary) -> CurvePoint {
    CurvePoint {
        series: series.into(),
        parameter,
        analytic_value: analytic,
        simulated_value: s.mean,
        ci_halfwidth: s.ci_halfwidth,
    }
}

/// Weight distribution observed on a set of graphs' edges.
fn empirical_model(support: &[f64], counts: &[u64]) -> Option<WeightModel> {
    let total: u64 = counts.iter().sum();
    if total == 0 {
        return None;
    }
    let pairs: Vec<(f64, f64)> = support
        .iter()
        .zip(counts)
        .filter(|(_, &c)| c > 0)
        .map(|(&v, &c)| (v, c as f64 / total as f64))
        .collect();
    WeightModel::new(pairs.iter().map(|p| p.0).collect(), pairs.iter().map(|p| p.1).collect()).ok()
}

struct CachingSample {
    degree: f64,
    per_user: f64,
    level_counts: Vec<u64>,
}

/// Per range `L`: mean degree `d(L)` and greedy per-user weight on the
/// caching graph, plus greedy on `G(n, d(L)/n)` drawn with the observed
/// weight distribution and the tree prediction for that `d`.
///
/// Series: `mean_degree` against `L`; `caching` and `gnp` against `d(L)`.
pub fn run_caching_case_study(study: &CachingStudy, samples: usize, seed: u64) -> Result<Vec<CurvePoint>> {
    let records = match &study.locations {
        Some(path) => read_locations(path)?,
        None => synthetic_locations(study.users, SYNTHETIC_FLOORS, seed),
    };
    let n = records.len();
    if n < 2 {
        return Err(Error::InvalidInput("the case study needs at least two users".into()));
    }
    let fallback = caching_weight_model(study.library_size, study.cache_size)?;
    let mut curve = Vec::new();
    for (i, &range) in study.ranges.iter().enumerate() {
        let runs: Vec<CachingSample> = run_samples(samples, derive_seed(seed, i as u64), |_, s| {
            let g = ingest_caching_instance(&records, study.library_size, study.cache_size, range, s)?;
            let mut level_counts = vec![0u64; g.support().len()];
            for e in g.edges() {
                level_counts[e.level as usize] += 1;
            }
            Ok(CachingSample {
                degree: g.mean_degree(),
                per_user: greedy_match(&g).total_weight / n as f64,
                level_counts,
            })
        })
        .into_iter()
        .collect::<Result<_>>()?;
        let degree = Summary::of(&runs.iter().map(|r| r.degree).collect::<Vec<_>>());
        let per_user = Summary::of(&runs.iter().map(|r| r.per_user).collect::<Vec<_>>());
        let mut counts = vec![0u64; fallback.k()];
        for r in &runs {
            for (c, x) in counts.iter_mut().zip(&r.level_counts) {
                *c += x;
            }
        }
        let model = empirical_model(fallback.values(), &counts).unwrap_or_else(|| fallback.clone());
        let d = degree.mean;
        let p = (d / (n as f64 - 1.0)).min(1.0);
        let gnp: Vec<f64> = run_samples(samples, derive_seed(seed, 500 + i as u64), |_, s| {
            if p == 0.0 {
                return Ok(0.0);
            }
            generate_gnp(n, p, &model, s).map(|g| greedy_match(&g).total_weight / n as f64)
        })
        .into_iter()
        .collect::<Result<_>>()?;
        let tree = expected_root_weight(d, &model, RootWeightMode::Analytic, 0, 0)?.value;
        curve.push(point("mean_degree", range, None, &degree));
        curve.push(point("caching", d, None, &per_user));
        curve.push(point("gnp", d, Some(tree), &Summary::of(&gnp)));
    }
    Ok(curve)
}

struct FailureSample {
    none: f64,
    type1: f64,
    type2: f64,
}

/// Greedy per-user weight against sharing range `L` on a uniform disk with
/// caching weights. Series `no_failure`, `type1` (distance failures only) and
/// `type2` (interference failures only).
pub fn run_failure_sweep(sweep: &FailureSweep, samples: usize, seed: u64) -> Result<Vec<CurvePoint>> {
    let weights = WeightSource::Caches {
        library_size: sweep.library_size,
        cache_size: sweep.cache_size,
    };
    let n = sweep.n as f64;
    let mut curve = Vec::new();
    for (i, &range) in sweep.ranges.iter().enumerate() {
        let radius = sweep.interference_radius.unwrap_or(range);
        let runs: Vec<FailureSample> = run_samples(samples, derive_seed(seed, i as u64), |_, s| {
            let g = generate_geometric(sweep.n, sweep.radius, range, &weights, s)?;
            let t1 = greedy_with_failures(&g, sweep.delta1, 0.0, radius, derive_seed(s, 1))?;
            let t2 = greedy_with_failures(&g, 0.0, sweep.delta2, radius, derive_seed(s, 2))?;
            Ok(FailureSample {
                none: t1.attempted_weight / n,
                type1: t1.surviving.total_weight / n,
                type2: t2.surviving.total_weight / n,
            })
        })
        .into_iter()
        .collect::<Result<_>>()?;
        let summary = |f: fn(&FailureSample) -> f64| Summary::of(&runs.iter().map(f).collect::<Vec<_>>());
        curve.push(point("no_failure", range, None, &summary(|r| r.none)));
        curve.push(point("type1", range, None, &summary(|r| r.type1)));
        curve.push(point("type2", range, None, &summary(|r| r.type2)));
    }
    Ok(curve)
}

pub fn interval_series_name(mu: f64, gamma: f64) -> String {
    format!("mu={mu},gamma={gamma}")
}

/// Time-average matched weight per minute against the interval `T` for each
/// `(mu, gamma)` pair (series `mu=..,gamma=..`), and the mean participant
/// count per epoch next to its steady-state value (series
/// `participants mu=..,gamma=..`).
pub fn run_interval_sweep(sweep: &IntervalSweep, samples: usize, seed: u64) -> Result<Vec<CurvePoint>> {
    let mut curve = Vec::new();
    let mut stream = 0u64;
    for &mu in &sweep.mus {
        for &gamma in &sweep.gammas {
            let name = interval_series_name(mu, gamma);
            let mut participants = Vec::new();
            for &t in &sweep.intervals {
                let mut params =
                    DynamicParams::new(sweep.lambda, mu, gamma, t, sweep.range, sweep.radius, 0, sweep.weights.clone());
                let span = sweep.minutes.max(t).div_ceil(t) * t;
                params.horizon = (params.warmup + span).max((3.0 / mu).ceil() as u32);
                let runs: Vec<(f64, f64)> = run_samples(samples, derive_seed(seed, stream), |_, s| {
                    run_dynamic(&params, s).map(|r| (r.time_average_weight, r.mean_participants))
                })
                .into_iter()
                .collect::<Result<_>>()?;
                stream += 1;
                let weight = Summary::of(&runs.iter().map(|r| r.0).collect::<Vec<_>>());
                let count = Summary::of(&runs.iter().map(|r| r.1).collect::<Vec<_>>());
                let m = steady_state_participants(sweep.lambda, mu, gamma, t)?;
                curve.push(point(name.clone(), t as f64, None, &weight));
                participants.push(point(format!("participants {name}"), t as f64, Some(m), &count));
            }
            curve.extend(participants);
        }
    }
    Ok(curve)
}
