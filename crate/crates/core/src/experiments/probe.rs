//! Monte Carlo probe of the vertical match probability in a two-row grid strip.
//!
//! The strip is a first-row path `0 .. n-1` with a pendant edge from each
//! first-row node `i` to its second-row node `n + i`, ids row-major, weights
//! i.i.d. uniform over two levels and ties broken toward the lower id. The
//! probe measures how often a second-row node is matched.

use serde::{Deserialize, Serialize};

use crate::analytics::{grid_proposal_probabilities, LeftRecursion};
use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::greedy::{greedy_match_with, GreedyOptions, TieRule};
use crate::rng::{rng_from_seed, run_samples};
use crate::stats::{Summary, Z95};
use crate::weights::WeightModel;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StripProbe {
    pub estimate: f64,
    pub ci_halfwidth: f64,
    /// Value from the self-consistent left recursion.
    pub self_consistent: f64,
    /// Value from the left recursion with right probabilities in its sum.
    pub right_in_sum: f64,
    pub matches_self_consistent: bool,
    pub matches_right_in_sum: bool,
}

pub fn strip_graph(n: usize, model: &WeightModel, seed: u64) -> WeightedGraph {
    let mut rng = rng_from_seed(seed);
    let mut edges = Vec::with_capacity(2 * n);
    for i in 0..n {
        if i + 1 < n {
            edges.push((i, i + 1, model.sample_level(&mut rng)));
        }
        edges.push((i, n + i, model.sample_level(&mut rng)));
    }
    WeightedGraph::build(2 * n, edges, model.values().to_vec())
}

/// Fraction of second-row nodes matched, away from the strip ends.
fn matched_fraction(n: usize, model: &WeightModel, seed: u64) -> f64 {
    let g = strip_graph(n, model, seed);
    let outcome = greedy_match_with(&g, &GreedyOptions::default().with_tie_rule(TieRule::Left));
    let margin = n / 10;
    let hits = outcome
        .matched_edges
        .iter()
        .filter(|m| m.j >= n + margin && m.j < 2 * n - margin)
        .count();
    hits as f64 / (n - 2 * margin) as f64
}

/// A candidate value matches when it lies within `3 sigma` of the estimate.
pub fn probe_strip(n: usize, samples: usize, seed: u64) -> Result<StripProbe> {
    if n < 10 || samples < 2 {
        return Err(Error::InvalidParameter("the probe needs n >= 10 and at least 2 samples".into()));
    }
    let model = WeightModel::two_level(1.0)?;
    let fractions = run_samples(samples, seed, |_, s| matched_fraction(n, &model, s));
    let s = Summary::of(&fractions);
    let sc = grid_proposal_probabilities(2, LeftRecursion::SelfConsistent).p_m;
    let ris = grid_proposal_probabilities(2, LeftRecursion::RightInSum).p_m;
    let near = |v: f64| (s.mean - v).abs() <= 3.0 * s.ci_halfwidth / Z95;
    Ok(StripProbe {
        estimate: s.mean,
        ci_halfwidth: s.ci_halfwidth,
        self_consistent: sc,
        right_in_sum: ris,
        matches_self_consistent: near(sc),
        matches_right_in_sum: near(ris),
    })
}
