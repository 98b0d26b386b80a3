//! Round-count scaling across graph sizes.

use super::config::{ExperimentConfig, GraphConfig};
use super::pr::collect_samples;
use super::report::{RoundsAtSize, RoundsReport};
use crate::error::{Error, Result};
use crate::graph::Family;
use crate::rng::derive_seed;
use crate::stats::{linear_fit, Summary};

pub const DEFAULT_SIZES: [usize; 3] = [1_000, 10_000, 100_000];

/// `graph` rescaled to about `n` nodes. Grids take the nearest side and
/// `G(n, p)` keeps its mean degree.
pub fn resize(graph: &GraphConfig, n: usize) -> Result<GraphConfig> {
    let family = match &graph.family {
        Family::Line { .. } => Family::Line { n },
        Family::Grid2d { .. } => Family::Grid2d {
            side: ((n as f64).sqrt().round() as usize).max(1),
        },
        Family::Gnp { n: n0, p } => {
            let d = p * (*n0 as f64 - 1.0);
            Family::Gnp {
                n,
                p: if n > 1 { (d / (n as f64 - 1.0)).min(1.0) } else { 0.0 },
            }
        }
        _ => return Err(Error::Config("rounds are measured on line, grid2d or gnp".into())),
    };
    Ok(GraphConfig {
        family,
        weights: graph.weights.clone(),
    })
}

pub fn measure_rounds(config: &ExperimentConfig) -> Result<RoundsReport> {
    let graph = config
        .graph
        .as_ref()
        .ok_or_else(|| Error::Config("round measurement needs a [graph] section".into()))?;
    let sizes = config.sizes.clone().unwrap_or_else(|| DEFAULT_SIZES.to_vec());
    let mut per_size = Vec::with_capacity(sizes.len());
    for (i, &n) in sizes.iter().enumerate() {
        let g = resize(graph, n)?;
        let records = collect_samples(config, &g, derive_seed(config.seed, 2000 + i as u64))?;
        let rounds: Vec<f64> = records.iter().map(|r| r.rounds as f64).collect();
        per_size.push(RoundsAtSize {
            nodes: records.first().map_or(n, |r| r.nodes),
            rounds: Summary::of(&rounds),
        });
    }
    let ns: Vec<f64> = per_size.iter().map(|s| s.nodes as f64).collect();
    let logs: Vec<f64> = ns.iter().map(|n| n.ln()).collect();
    let means: Vec<f64> = per_size.iter().map(|s| s.rounds.mean).collect();
    let (intercept, log_slope, r_squared) = if ns.len() >= 2 {
        linear_fit(&logs, &means)
    } else {
        (f64::NAN, f64::NAN, f64::NAN)
    };
    let linear_slope = if ns.len() >= 2 { linear_fit(&ns, &means).1 } else { f64::NAN };
    let per_node: Vec<f64> = means.iter().zip(&ns).map(|(r, n)| r / n).collect();
    let applicability_holds = match (&graph.family, graph.model()) {
        (Family::Gnp { n, p }, Some(m)) => Some(p * (*n as f64 - 1.0) < 2.0 / m.max_prob()),
        _ => None,
    };
    Ok(RoundsReport {
        sizes: per_size,
        intercept,
        log_slope,
        r_squared,
        linear_slope,
        rounds_per_node_decreasing: per_node.windows(2).all(|w| w[1] < w[0]),
        applicability_holds,
    })
}
