//! Performance-ratio estimation by paired Monte Carlo sampling.

use super::config::{Baseline, ExperimentConfig, GraphConfig};
use super::report::{CurvePoint, PrEstimate, SampleRecord};
use crate::analytics::{pr_lower_bound_grid, pr_lower_bound_linear, pr_lower_bound_multiunit};
use crate::error::{Error, Result};
use crate::exact::{
    decomposition_bound_instance, multiunit_bound, neighbor_max_bound, neighbor_max_bound_expected,
    optimal_exhaustive, optimal_multiunit_exhaustive, optimal_path_dp, optimal_tree_dp, DEFAULT_MAX_EDGES,
};
use crate::graph::{generate, Family, WeightSource, WeightedGraph};
use crate::greedy::{greedy_match_multiunit_with, greedy_match_with, GreedyOptions};
use crate::rng::{derive_seed, rng_from_seed, run_samples};
use crate::stats::{mean_of_ratios, ratio_of_means};
use crate::weights::WeightModel;

/// Builds the sample graph for `seed`, with quantities when configured.
pub fn sample_graph(config: &ExperimentConfig, graph: &GraphConfig, seed: u64) -> Result<WeightedGraph> {
    let g = generate(&graph.spec(seed))?;
    match &config.quantities {
        None => Ok(g),
        Some(q) => {
            let model = q.as_model()?;
            let mut rng = rng_from_seed(derive_seed(seed, 1));
            let values = model.values();
            let qs = (0..g.n()).map(|_| values[model.sample_level(&mut rng) as usize] as u32).collect();
            g.with_quantities(qs)
        }
    }
}

pub fn baseline_value(baseline: Baseline, g: &WeightedGraph, model: Option<&WeightModel>) -> Result<f64> {
    let multiunit = g.quantities().is_some();
    Ok(match baseline {
        Baseline::Decomposition => decomposition_bound_instance(g)?.total_weight,
        Baseline::NeighborMax => match model {
            Some(m) => neighbor_max_bound_expected(g, m),
            None => neighbor_max_bound(g).total_weight,
        },
        Baseline::PathDp => optimal_path_dp(g)?.total_weight,
        Baseline::TreeDp => optimal_tree_dp(g)?.total_weight,
        Baseline::Exhaustive if multiunit => optimal_multiunit_exhaustive(g)?.total_weight,
        Baseline::Exhaustive => optimal_exhaustive(g, DEFAULT_MAX_EDGES)?.total_weight,
        Baseline::MultiunitBound => multiunit_bound(g)?.total_weight,
    })
}

fn run_one(config: &ExperimentConfig, graph: &GraphConfig, index: usize, seed: u64) -> Result<SampleRecord> {
    let g = sample_graph(config, graph, seed)?;
    let opts = GreedyOptions::default().with_tie_rule(config.tie_rule);
    let outcome = if config.quantities.is_some() {
        greedy_match_multiunit_with(&g, &opts)?
    } else {
        greedy_match_with(&g, &opts)
    };
    let baseline = config
        .baseline
        .map(|b| baseline_value(b, &g, graph.model()))
        .transpose()?;
    Ok(SampleRecord {
        index,
        seed,
        nodes: g.n(),
        greedy: outcome.total_weight,
        baseline,
        rounds: outcome.rounds,
    })
}

/// Runs `config.samples` independent samples of `graph`, in index order.
pub fn collect_samples(config: &ExperimentConfig, graph: &GraphConfig, master: u64) -> Result<Vec<SampleRecord>> {
    run_samples(config.samples, master, |i, s| run_one(config, graph, i, s))
        .into_iter()
        .collect()
}

/// Closed-form lower bound for the configured family, baseline and weights.
pub fn analytic_lower_bound(config: &ExperimentConfig, graph: &GraphConfig) -> Option<f64> {
    let model = graph.model()?;
    let two_level_unit = model.k() == 2 && model.is_uniform() && model.values()[0] == 1.0;
    match (&graph.family, config.baseline?) {
        (Family::Line { .. }, Baseline::Decomposition) if config.quantities.is_none() => pr_lower_bound_linear(model).ok(),
        (Family::Grid2d { .. }, Baseline::NeighborMax) if two_level_unit && config.quantities.is_none() => {
            pr_lower_bound_grid(model).ok()
        }
        (Family::Line { .. }, Baseline::MultiunitBound) if two_level_unit => {
            let q = config.quantities.as_ref()?.as_model().ok()?;
            (q.values() == [1.0, 2.0] && q.is_uniform())
                .then(|| pr_lower_bound_multiunit(model).ok())
                .flatten()
        }
        _ => None,
    }
}

pub fn pr_estimate(config: &ExperimentConfig, graph: &GraphConfig, records: &[SampleRecord]) -> Result<PrEstimate> {
    let baseline = config.baseline.ok_or_else(|| Error::Config("no baseline configured".into()))?;
    let greedy: Vec<f64> = records.iter().map(|r| r.greedy).collect();
    let base: Vec<f64> = records.iter().map(|r| r.baseline.unwrap_or(f64::NAN)).collect();
    Ok(PrEstimate {
        baseline: baseline.name().to_string(),
        ratio_of_means: ratio_of_means(&greedy, &base),
        mean_of_ratios: mean_of_ratios(&greedy, &base),
        analytic_lower_bound: analytic_lower_bound(config, graph),
    })
}

/// The graph config with two-level weights `{1, 1 + delta}`.
pub fn with_two_level(graph: &GraphConfig, delta: f64) -> Result<GraphConfig> {
    Ok(GraphConfig {
        family: graph.family.clone(),
        weights: WeightSource::Model {
            model: WeightModel::two_level(delta)?,
        },
    })
}

/// Ratio-of-means PR at every value of the config's `delta_grid`.
pub fn delta_sweep(config: &ExperimentConfig, graph: &GraphConfig) -> Result<Vec<CurvePoint>> {
    let grid = config.delta_grid.as_deref().unwrap_or_default();
    let mut curve = Vec::with_capacity(grid.len());
    for (i, &delta) in grid.iter().enumerate() {
        let g = with_two_level(graph, delta)?;
        let records = collect_samples(config, &g, derive_seed(config.seed, 1000 + i as u64))?;
        let est = pr_estimate(config, &g, &records)?;
        curve.push(CurvePoint {
            series: "pr".into(),
            parameter: delta,
            analytic_value: est.analytic_lower_bound,
            simulated_value: est.ratio_of_means.ratio,
            ci_halfwidth: est.ratio_of_means.ci_halfwidth,
        });
    }
    Ok(curve)
}
