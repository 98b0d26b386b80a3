//! Upper bounds on the optimal matching weight.

use super::{Method, OptimalResult};
use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::weights::WeightModel;

/// Layered decomposition of a path: for each level `k`, the increment
/// `v_k - v_{k-1}` times the maximum cardinality matching of the maximal runs
/// of edges at level `>= k`. `levels` index into `values`, in path order.
pub fn decomposition_bound_levels(levels: &[u16], values: &[f64]) -> f64 {
    let mut total = 0.0;
    let mut prev = 0.0;
    for (k, &v) in values.iter().enumerate() {
        let mut pairs = 0usize;
        let mut run = 0usize;
        for &l in levels {
            if l as usize >= k {
                run += 1;
            } else {
                pairs += run.div_ceil(2);
                run = 0;
            }
        }
        pairs += run.div_ceil(2);
        total += (v - prev) * pairs as f64;
        prev = v;
    }
    total
}

/// As [`decomposition_bound_levels`] for raw weights, each of which must be
/// an exact member of the sorted support `values`.
pub fn decomposition_bound_weights(weights: &[f64], values: &[f64]) -> Result<f64> {
    if values.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidInput("support must be strictly increasing".into()));
    }
    let levels = weights
        .iter()
        .map(|w| {
            values
                .iter()
                .position(|v| v == w)
                .map(|l| l as u16)
                .ok_or_else(|| Error::InvalidInput(format!("weight {w} is not in the support")))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(decomposition_bound_levels(&levels, values))
}

pub fn decomposition_bound_instance(g: &WeightedGraph) -> Result<OptimalResult> {
    let order = g.path_order().ok_or(Error::WrongFamily { expected: "path" })?;
    let levels: Vec<u16> = order.iter().map(|&e| g.edges()[e].level).collect();
    Ok(OptimalResult::bound(
        Method::DecompositionBound,
        decomposition_bound_levels(&levels, g.support()),
    ))
}

/// Expected decomposition bound on an `n`-user line with the ceilings of the
/// first layer dropped: `n v_1 / 2 + n sum_k (v_{k+1} - v_k)(1 - F_k)/(2 - F_k)`.
pub fn decomposition_bound_expected(n: usize, model: &WeightModel) -> f64 {
    let v = model.values();
    let layered: f64 = (0..model.k() - 1)
        .map(|k| {
            let f = model.cumulative(k);
            (v[k + 1] - v[k]) * (1.0 - f) / (2.0 - f)
        })
        .sum();
    n as f64 * (v[0] / 2.0 + layered)
}

/// Instance bound `1/2 sum_i max_j w_ij`.
pub fn neighbor_max_bound(g: &WeightedGraph) -> OptimalResult {
    let total: f64 = (0..g.n())
        .map(|i| {
            g.neighbors(i)
                .iter()
                .map(|nb| g.edges()[nb.edge as usize].weight)
                .fold(0.0, f64::max)
        })
        .sum();
    OptimalResult::bound(Method::NeighborMaxBound, 0.5 * total)
}

/// `E[max of deg i.i.d. weights]`, zero for an isolated node.
pub fn expected_max_neighbor_weight(degree: usize, model: &WeightModel) -> f64 {
    if degree == 0 {
        return 0.0;
    }
    let d = degree as i32;
    model
        .values()
        .iter()
        .enumerate()
        .map(|(k, v)| v * (model.cumulative(k).powi(d) - model.cumulative_below(k).powi(d)))
        .sum()
}

/// Expectation of the neighbour-max bound over weights on this topology.
pub fn neighbor_max_bound_expected(g: &WeightedGraph, model: &WeightModel) -> f64 {
    let mut by_degree: Vec<usize> = Vec::new();
    for i in 0..g.n() {
        let d = g.degree(i);
        if by_degree.len() <= d {
            by_degree.resize(d + 1, 0);
        }
        by_degree[d] += 1;
    }
    0.5 * by_degree
        .iter()
        .enumerate()
        .map(|(d, &count)| count as f64 * expected_max_neighbor_weight(d, model))
        .sum::<f64>()
}

/// Per-node expected bound with degree mixed over the probability generating
/// function `pgf`: `1/2 sum_k v_k (pgf(F_k) - pgf(F_{k-1}))`.
fn mixed_bound(model: &WeightModel, pgf: impl Fn(f64) -> f64) -> f64 {
    0.5 * model
        .values()
        .iter()
        .enumerate()
        .map(|(k, v)| v * (pgf(model.cumulative(k)) - pgf(model.cumulative_below(k))))
        .sum::<f64>()
}

/// Per-node expected bound in `G(n, p)`: degree ~ Binomial(n - 1, p).
pub fn neighbor_max_expected_binomial(n: usize, p: f64, model: &WeightModel) -> f64 {
    let trials = n.saturating_sub(1) as f64;
    mixed_bound(model, |x| (1.0 - p * (1.0 - x)).powf(trials))
}

/// Per-node expected bound with Poisson(`d`) degrees.
pub fn neighbor_max_expected_poisson(d: f64, model: &WeightModel) -> f64 {
    mixed_bound(model, |x| (-d * (1.0 - x)).exp())
}

/// Multi-unit bound: each node fills its quantity from its neighbours in
/// descending weight order, taking `min(remaining, q_j)` from neighbour `j`;
/// half the summed per-node weight.
pub fn multiunit_bound(g: &WeightedGraph) -> Result<OptimalResult> {
    let q = g
        .quantities()
        .ok_or_else(|| Error::InvalidInput("multi-unit bound needs quantities".into()))?;
    let mut total = 0.0;
    let mut scratch: Vec<(f64, u32)> = Vec::new();
    for i in 0..g.n() {
        scratch.clear();
        scratch.extend(
            g.neighbors(i)
                .iter()
                .map(|nb| (g.edges()[nb.edge as usize].weight, q[nb.node as usize])),
        );
        scratch.sort_by(|a, b| b.0.total_cmp(&a.0));
        let mut left = q[i];
        for &(w, qj) in &scratch {
            if left == 0 {
                break;
            }
            let x = left.min(qj);
            total += w * x as f64;
            left -= x;
        }
    }
    Ok(OptimalResult::bound(Method::MultiunitBound, 0.5 * total))
}
