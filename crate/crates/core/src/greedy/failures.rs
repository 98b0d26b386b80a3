//! Post-match transaction failures on geometric graphs.
//!
//! A matched pair at distance `D` fails with probability `min(1, delta1 D)`
//! (type I). It also fails with probability `min(1, delta2 I)` (type II),
//! where `I` counts the other matched pairs whose midpoints lie within
//! `interference_radius` of its own midpoint. The two draws are independent.

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::{greedy_match, MatchingOutcome};
use crate::error::{Error, Result};
use crate::graph::spatial::{dist, CellIndex};
use crate::graph::WeightedGraph;
use crate::rng::rng_from_seed;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailureOutcome {
    /// Surviving pairs only; `total_weight` is the surviving weight.
    pub surviving: MatchingOutcome,
    pub attempted_weight: f64,
    pub type1_failures: usize,
    pub type2_failures: usize,
}

pub fn greedy_with_failures(
    g: &WeightedGraph,
    delta1: f64,
    delta2: f64,
    interference_radius: f64,
    seed: u64,
) -> Result<FailureOutcome> {
    let coords = g
        .coords()
        .ok_or_else(|| Error::InvalidInput("failure model needs node coordinates".into()))?;
    if !(delta1 >= 0.0 && delta2 >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "failure coefficients must be >= 0, got {delta1} and {delta2}"
        )));
    }
    if !(interference_radius >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "interference radius must be >= 0, got {interference_radius}"
        )));
    }
    let base = greedy_match(g);
    let midpoints: Vec<[f64; 2]> = base
        .matched_edges
        .iter()
        .map(|m| {
            let (a, b) = (coords[m.i], coords[m.j]);
            [(a[0] + b[0]) / 2.0, (a[1] + b[1]) / 2.0]
        })
        .collect();
    let interferers: Vec<usize> = if delta2 > 0.0 && interference_radius > 0.0 {
        let index = CellIndex::new(&midpoints, interference_radius);
        midpoints
            .iter()
            .enumerate()
            .map(|(k, p)| {
                let mut count = 0;
                index.for_candidates(p, |other| {
                    if other != k && dist(p, &midpoints[other]) <= interference_radius {
                        count += 1;
                    }
                });
                count
            })
            .collect()
    } else {
        vec![0; midpoints.len()]
    };

    let mut rng = rng_from_seed(seed);
    let mut surviving = MatchingOutcome {
        rounds: base.rounds,
        ..MatchingOutcome::empty()
    };
    let (mut type1, mut type2) = (0, 0);
    for (m, &count) in base.matched_edges.iter().zip(&interferers) {
        let d = dist(&coords[m.i], &coords[m.j]);
        let p1 = (delta1 * d).min(1.0);
        let p2 = (delta2 * count as f64).min(1.0);
        let fail1 = rng.random::<f64>() < p1;
        let fail2 = rng.random::<f64>() < p2;
        type1 += fail1 as usize;
        type2 += fail2 as usize;
        if !fail1 && !fail2 {
            surviving.total_weight += m.weight * m.units as f64;
            surviving.matched_edges.push(*m);
        }
    }
    Ok(FailureOutcome {
        surviving,
        attempted_weight: base.total_weight,
        type1_failures: type1,
        type2_failures: type2,
    })
}
