//! Performance-ratio curve on sparse `G(n, d/n)` and the dense-regime check.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{neighbor_max_bound_expected, neighbor_max_expected_poisson};
use crate::graph::generate_gnp;
use crate::greedy::{greedy_match_with, GreedyOptions};
use crate::rng::run_samples;
use crate::stats::{ratio_of_means, Summary};
use crate::weights::WeightModel;

use super::tree::{expected_root_weight, RootWeightMode};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GnpCurvePoint {
    pub d: f64,
    /// Tree root weight over the Poisson-mixed neighbor-max bound, per node.
    pub analytic_pr: f64,
    /// `d >= 1`: the tree value is an approximation.
    pub approximate: bool,
    /// Greedy total over the neighbor-max expectation at the realised degrees.
    pub simulated_pr: f64,
    pub ci_halfwidth: f64,
    pub greedy_per_node: f64,
    pub greedy_per_node_ci: f64,
    pub tree_per_node: f64,
}

struct GnpSample {
    greedy: f64,
    bound: f64,
}

fn sample_gnp(n: usize, d: f64, model: &WeightModel, seed: u64, workers: usize) -> Result<GnpSample> {
    let g = generate_gnp(n, d / n as f64, model, seed)?;
    let outcome = greedy_match_with(&g, &GreedyOptions::default().with_workers(workers));
    Ok(GnpSample {
        greedy: outcome.total_weight,
        bound: neighbor_max_bound_expected(&g, model),
    })
}

pub fn pr_curve_gnp(d_grid: &[f64], n: usize, model: &WeightModel, samples: usize, seed: u64) -> Result<Vec<GnpCurvePoint>> {
    if n < 2 {
        return Err(Error::InvalidSize(format!("G(n,p) curve needs n >= 2, got {n}")));
    }
    if samples < 2 {
        return Err(Error::InvalidParameter("curve needs at least 2 samples per point".into()));
    }
    let mut curve = Vec::with_capacity(d_grid.len());
    for (i, &d) in d_grid.iter().enumerate() {
        if !(d > 0.0) || d >= n as f64 {
            return Err(Error::InvalidParameter(format!("mean degree must lie in (0, n), got {d}")));
        }
        let point_seed = crate::rng::derive_seed(seed, i as u64);
        let runs = run_samples(samples, point_seed, |_, s| sample_gnp(n, d, model, s, 1));
        let runs: Vec<GnpSample> = runs.into_iter().collect::<Result<_>>()?;
        let greedy: Vec<f64> = runs.iter().map(|r| r.greedy).collect();
        let bound: Vec<f64> = runs.iter().map(|r| r.bound).collect();
        let est = ratio_of_means(&greedy, &bound);
        let root = expected_root_weight(d, model, RootWeightMode::Analytic, 0, 0)?;
        let denom = neighbor_max_expected_poisson(d, model);
        curve.push(GnpCurvePoint {
            d,
            analytic_pr: root.value / denom,
            approximate: root.approximate,
            simulated_pr: est.ratio,
            ci_halfwidth: est.ci_halfwidth,
            greedy_per_node: Summary::of(&greedy).mean / n as f64,
            greedy_per_node_ci: Summary::of(&greedy).ci_halfwidth / n as f64,
            tree_per_node: root.value,
        });
    }
    Ok(curve)
}

/// Greedy total on `G(n, p)` over `n v_K / 2`, the weight of a perfect matching
/// on top-weight edges. Mean over `samples` graphs.
pub fn dense_gnp_ratio(n: usize, p: f64, model: &WeightModel, samples: usize, seed: u64) -> Result<Summary> {
    if samples == 0 {
        return Err(Error::InvalidParameter("need at least one sample".into()));
    }
    let ceiling = n as f64 * model.max_value() / 2.0;
    let runs = run_samples(samples, seed, |_, s| -> Result<f64> {
        let g = generate_gnp(n, p, model, s)?;
        Ok(greedy_match_with(&g, &GreedyOptions::default()).total_weight / ceiling)
    });
    let ratios: Vec<f64> = runs.into_iter().collect::<Result<_>>()?;
    Ok(Summary::of(&ratios))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k2() -> WeightModel {
        WeightModel::uniform(vec![1.0, 2.0]).unwrap()
    }

    #[test]
    fn small_degree_ratio_tends_to_one() {
        let c = pr_curve_gnp(&[1e-3], 2000, &k2(), 4, 1).unwrap();
        assert!(c[0].analytic_pr > 0.999, "{}", c[0].analytic_pr);
    }

    #[test]
    fn simulated_ratio_never_exceeds_one_much() {
        let c = pr_curve_gnp(&[0.5, 3.0], 3000, &k2(), 8, 2).unwrap();
        for p in &c {
            assert!(p.simulated_pr <= 1.0 + 3.0 * p.ci_halfwidth);
            assert!(p.simulated_pr > 0.7);
        }
        assert!(!c[0].approximate && c[1].approximate);
    }

    #[test]
    fn dense_ratio_grows_with_n() {
        let small = dense_gnp_ratio(100, 0.05, &k2(), 20, 3).unwrap().mean;
        let large = dense_gnp_ratio(1000, 0.05, &k2(), 4, 3).unwrap().mean;
        assert!(large > small);
    }

    #[test]
    fn rejects_bad_degree() {
        assert!(pr_curve_gnp(&[0.0], 100, &k2(), 4, 0).is_err());
    }
}
