//! Round-synchronous greedy matching.
//!
//! Each round every active node proposes to its preferred active neighbour
//! (heaviest edge, ties broken by a [`TieRule`]); mutual proposals are
//! committed. A round counts only if at least one proposal was sent. Both
//! endpoints of any edge rank it identically under either tie rule, so the
//! outcome equals sequential greedy over one strict global edge order.
//!
//! The multi-unit revision is the same loop with per-node capacities: a
//! committed pair exchanges `min(residual_i, residual_j)` units and a node
//! leaves once its residual reaches zero. Single-unit matching is the
//! capacity-one case.

mod dynamic;
mod failures;

pub use dynamic::{run_dynamic, DynamicParams, DynamicSeries, EpochRecord};
pub use failures::{greedy_with_failures, FailureOutcome};

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Neighbor, WeightedGraph};

/// How equal-weight neighbours are ranked.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TieRule {
    /// Higher neighbour id wins.
    #[default]
    Id,
    /// Lower neighbour id wins; on a left-to-right line this is "prefer the
    /// left neighbour".
    Left,
}

impl std::str::FromStr for TieRule {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "id" => Ok(TieRule::Id),
            "left" => Ok(TieRule::Left),
            other => Err(Error::InvalidParameter(format!("unknown tie rule {other:?} (expected id or left)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GreedyOptions {
    pub tie_rule: TieRule,
    /// 1 runs the proposal phase inline, 0 uses the global rayon pool, any
    /// other value a dedicated pool of that size.
    pub workers: usize,
    pub trace: bool,
}

impl Default for GreedyOptions {
    fn default() -> Self {
        GreedyOptions {
            tie_rule: TieRule::Id,
            workers: 1,
            trace: false,
        }
    }
}

impl GreedyOptions {
    pub fn with_tie_rule(mut self, tie_rule: TieRule) -> Self {
        self.tie_rule = tie_rule;
        self
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }

    pub fn with_trace(mut self) -> Self {
        self.trace = true;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MatchedEdge {
    pub i: usize,
    pub j: usize,
    pub units: u32,
    pub weight: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundTrace {
    pub round: u32,
    pub proposals: usize,
    pub matches: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchingOutcome {
    pub matched_edges: Vec<MatchedEdge>,
    pub total_weight: f64,
    pub rounds: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace: Option<Vec<RoundTrace>>,
}

impl MatchingOutcome {
    pub fn empty() -> Self {
        MatchingOutcome {
            matched_edges: Vec::new(),
            total_weight: 0.0,
            rounds: 0,
            trace: None,
        }
    }

    /// Per-node `(neighbour, units)` lists.
    pub fn allocations(&self, n: usize) -> Vec<Vec<(usize, u32)>> {
        let mut out = vec![Vec::new(); n];
        for m in &self.matched_edges {
            out[m.i].push((m.j, m.units));
            out[m.j].push((m.i, m.units));
        }
        out
    }

    /// Single partner per node; meaningful for single-unit outcomes.
    pub fn partners(&self, n: usize) -> Vec<Option<usize>> {
        let mut out = vec![None; n];
        for m in &self.matched_edges {
            out[m.i] = Some(m.j);
            out[m.j] = Some(m.i);
        }
        out
    }

    pub fn recomputed_weight(&self) -> f64 {
        self.matched_edges.iter().map(|m| m.weight * m.units as f64).sum()
    }

    /// Checks that every matched edge exists with the recorded weight, that
    /// no node exceeds its capacity (1 without quantities) and that the
    /// stored total matches the edge sum.
    pub fn validate(&self, g: &WeightedGraph) -> Result<()> {
        let mut used = vec![0u64; g.n()];
        for m in &self.matched_edges {
            if m.i >= g.n() || m.j >= g.n() {
                return Err(Error::InvalidInput(format!("matched edge ({}, {}) out of range", m.i, m.j)));
            }
            let e = g
                .find_edge(m.i, m.j)
                .ok_or_else(|| Error::InvalidInput(format!("({}, {}) is not an edge", m.i, m.j)))?;
            if g.edges()[e].weight != m.weight || m.units == 0 {
                return Err(Error::InvalidInput(format!("matched edge ({}, {}) has a bad weight or zero units", m.i, m.j)));
            }
            used[m.i] += m.units as u64;
            used[m.j] += m.units as u64;
        }
        let cap = |i: usize| g.quantities().map_or(1, |q| q[i]) as u64;
        if let Some(i) = (0..g.n()).find(|&i| used[i] > cap(i)) {
            return Err(Error::InvalidInput(format!("node {i} allocates {} units over capacity {}", used[i], cap(i))));
        }
        let recomputed = self.recomputed_weight();
        if (recomputed - self.total_weight).abs() > 1e-9 * recomputed.abs().max(1.0) {
            return Err(Error::InvalidInput(format!(
                "total weight {} differs from edge sum {recomputed}",
                self.total_weight
            )));
        }
        Ok(())
    }

    /// True when no edge joins two nodes that both have spare capacity.
    pub fn is_maximal(&self, g: &WeightedGraph) -> bool {
        let mut residual: Vec<i64> = (0..g.n()).map(|i| g.quantities().map_or(1, |q| q[i]) as i64).collect();
        for m in &self.matched_edges {
            residual[m.i] -= m.units as i64;
            residual[m.j] -= m.units as i64;
        }
        g.edges().iter().all(|e| residual[e.u as usize] <= 0 || residual[e.v as usize] <= 0)
    }

    /// Per-round trace as CSV with header `round,proposals,matches`.
    pub fn trace_csv(&self) -> Option<String> {
        let trace = self.trace.as_ref()?;
        let mut out = String::from("round,proposals,matches\n");
        for t in trace {
            writeln!(out, "{},{},{}", t.round, t.proposals, t.matches).expect("string write");
        }
        Some(out)
    }
}

/// Single-unit greedy matching with the default id tie rule. Quantities, if
/// present, are ignored.
pub fn greedy_match(g: &WeightedGraph) -> MatchingOutcome {
    greedy_match_with(g, &GreedyOptions::default())
}

pub fn greedy_match_with(g: &WeightedGraph, opts: &GreedyOptions) -> MatchingOutcome {
    run_engine(g, None, opts)
}

/// Multi-unit greedy allocation using the graph's quantities as capacities.
pub fn greedy_match_multiunit(g: &WeightedGraph) -> Result<MatchingOutcome> {
    greedy_match_multiunit_with(g, &GreedyOptions::default())
}

pub fn greedy_match_multiunit_with(g: &WeightedGraph, opts: &GreedyOptions) -> Result<MatchingOutcome> {
    let q = g
        .quantities()
        .ok_or_else(|| Error::InvalidInput("multi-unit matching needs per-node quantities".into()))?;
    Ok(run_engine(g, Some(q), opts))
}

/// Neighbour lists sorted best-first: heavier level first, then the tie rule.
fn preference_lists(g: &WeightedGraph, tie: TieRule) -> (Vec<usize>, Vec<Neighbor>) {
    let mut offsets = Vec::with_capacity(g.n() + 1);
    let mut prefs = Vec::with_capacity(2 * g.num_edges());
    offsets.push(0);
    let edges = g.edges();
    for i in 0..g.n() {
        let start = prefs.len();
        prefs.extend_from_slice(g.neighbors(i));
        let slice = &mut prefs[start..];
        match tie {
            TieRule::Id => slice.sort_unstable_by_key(|nb| (std::cmp::Reverse(edges[nb.edge as usize].level), std::cmp::Reverse(nb.node))),
            TieRule::Left => slice.sort_unstable_by_key(|nb| (std::cmp::Reverse(edges[nb.edge as usize].level), nb.node)),
        }
        offsets.push(prefs.len());
    }
    (offsets, prefs)
}

const PAR_THRESHOLD: usize = 1 << 14;

fn run_engine(g: &WeightedGraph, caps: Option<&[u32]>, opts: &GreedyOptions) -> MatchingOutcome {
    match opts.workers {
        0 | 1 => engine(g, caps, opts),
        w => match rayon::ThreadPoolBuilder::new().num_threads(w).build() {
            Ok(pool) => pool.install(|| engine(g, caps, opts)),
            Err(_) => engine(g, caps, &GreedyOptions { workers: 0, ..*opts }),
        },
    }
}

fn engine(g: &WeightedGraph, caps: Option<&[u32]>, opts: &GreedyOptions) -> MatchingOutcome {
    let n = g.n();
    let (offsets, prefs) = preference_lists(g, opts.tie_rule);
    let mut residual: Vec<u32> = caps.map_or_else(|| vec![1; n], <[u32]>::to_vec);
    let mut active: Vec<bool> = residual.iter().map(|r| *r > 0).collect();
    let mut cursor: Vec<usize> = offsets[..n].to_vec();
    let mut target = vec![u32::MAX; n];
    let mut frontier: Vec<u32> = (0..n as u32).filter(|&i| g.degree(i as usize) > 0).collect();
    let mut outcome = MatchingOutcome::empty();
    let mut trace = opts.trace.then(Vec::new);
    let parallel = opts.workers != 1;

    // first still-active entry at or after the node's cursor
    let propose = |i: u32, active: &[bool], cursor: &[usize]| -> Option<usize> {
        let end = offsets[i as usize + 1];
        (cursor[i as usize]..end).find(|&p| active[prefs[p].node as usize])
    };

    loop {
        let choices: Vec<Option<usize>> = if parallel && frontier.len() >= PAR_THRESHOLD {
            frontier.par_iter().map(|&i| propose(i, &active, &cursor)).collect()
        } else {
            frontier.iter().map(|&i| propose(i, &active, &cursor)).collect()
        };
        let mut proposers = Vec::with_capacity(frontier.len());
        for (&i, choice) in frontier.iter().zip(choices) {
            if let Some(p) = choice {
                cursor[i as usize] = p;
                target[i as usize] = prefs[p].node;
                proposers.push(i);
            }
        }
        if proposers.is_empty() {
            break;
        }
        outcome.rounds += 1;

        let mut matches = 0;
        for &i in &proposers {
            let j = target[i as usize];
            if i < j && target[j as usize] == i {
                let edge = &g.edges()[prefs[cursor[i as usize]].edge as usize];
                let (iu, ju) = (i as usize, j as usize);
                let units = residual[iu].min(residual[ju]);
                residual[iu] -= units;
                residual[ju] -= units;
                active[iu] = residual[iu] > 0;
                active[ju] = residual[ju] > 0;
                outcome.total_weight += edge.weight * units as f64;
                outcome.matched_edges.push(MatchedEdge {
                    i: iu,
                    j: ju,
                    units,
                    weight: edge.weight,
                });
                matches += 1;
            }
        }
        if let Some(t) = trace.as_mut() {
            t.push(RoundTrace {
                round: outcome.rounds,
                proposals: proposers.len(),
                matches,
            });
        }
        for &i in &proposers {
            target[i as usize] = u32::MAX;
        }
        proposers.retain(|&i| active[i as usize]);
        frontier = proposers;
    }
    outcome.trace = trace;
    debug_assert!(outcome.validate(g).is_ok());
    outcome
}

#[cfg(test)]
mod tests;
