//! Exact maximum-weight matching on tractable instances, plus upper bounds.

mod bounds;

pub use bounds::{
    decomposition_bound_expected, decomposition_bound_instance, decomposition_bound_levels,
    decomposition_bound_weights, expected_max_neighbor_weight, neighbor_max_bound,
    neighbor_max_bound_expected, neighbor_max_expected_binomial, neighbor_max_expected_poisson,
    multiunit_bound,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::greedy::{greedy_match, greedy_match_multiunit, MatchedEdge};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    PathDp,
    TreeDp,
    Exhaustive,
    MultiunitExhaustive,
    DecompositionBound,
    NeighborMaxBound,
    MultiunitBound,
}

impl Method {
    pub fn is_exact(self) -> bool {
        matches!(
            self,
            Method::PathDp | Method::TreeDp | Method::Exhaustive | Method::MultiunitExhaustive
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimalResult {
    pub total_weight: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matched_edges: Option<Vec<MatchedEdge>>,
    pub method: Method,
}

impl OptimalResult {
    fn exact(method: Method, g: &WeightedGraph, edges: Vec<usize>) -> Self {
        let matched: Vec<MatchedEdge> = edges
            .into_iter()
            .map(|e| {
                let edge = &g.edges()[e];
                MatchedEdge {
                    i: edge.u as usize,
                    j: edge.v as usize,
                    units: 1,
                    weight: edge.weight,
                }
            })
            .collect();
        OptimalResult {
            total_weight: matched.iter().map(|m| m.weight).sum(),
            matched_edges: Some(matched),
            method,
        }
    }

    pub(crate) fn bound(method: Method, total_weight: f64) -> Self {
        OptimalResult {
            total_weight,
            matched_edges: None,
            method,
        }
    }
}

/// Maximum-weight matching on a path via `M(i) = max(M(i-1), M(i-2) + w_i)`.
pub fn optimal_path_dp(g: &WeightedGraph) -> Result<OptimalResult> {
    let order = g.path_order().ok_or(Error::WrongFamily { expected: "path" })?;
    let w: Vec<f64> = order.iter().map(|&e| g.edges()[e].weight).collect();
    let m = w.len();
    // best[k]: optimum over the first k edges
    let mut best = vec![0.0; m + 1];
    for k in 1..=m {
        let take = w[k - 1] + if k >= 2 { best[k - 2] } else { 0.0 };
        best[k] = best[k - 1].max(take);
    }
    let mut chosen = Vec::new();
    let mut k = m;
    while k >= 1 {
        if best[k] == best[k - 1] {
            k -= 1;
        } else {
            chosen.push(order[k - 1]);
            k = k.saturating_sub(2);
        }
    }
    chosen.reverse();
    Ok(OptimalResult::exact(Method::PathDp, g, chosen))
}

/// Maximum-weight matching on a forest by the rooted two-state DP.
pub fn optimal_tree_dp(g: &WeightedGraph) -> Result<OptimalResult> {
    if !g.is_forest() {
        return Err(Error::WrongFamily { expected: "forest" });
    }
    let n = g.n();
    let mut parent = vec![usize::MAX; n];
    let mut parent_edge = vec![usize::MAX; n];
    let mut order = Vec::with_capacity(n);
    let mut seen = vec![false; n];
    for root in 0..n {
        if seen[root] {
            continue;
        }
        seen[root] = true;
        let start = order.len();
        order.push(root);
        let mut head = start;
        while head < order.len() {
            let v = order[head];
            head += 1;
            for nb in g.neighbors(v) {
                let c = nb.node as usize;
                if !seen[c] {
                    seen[c] = true;
                    parent[c] = v;
                    parent_edge[c] = nb.edge as usize;
                    order.push(c);
                }
            }
        }
    }
    // free[v]: v unmatched within its subtree; any[v]: v may be matched to a child
    let mut free = vec![0.0; n];
    let mut any = vec![0.0; n];
    let mut pick = vec![usize::MAX; n];
    for &v in order.iter().rev() {
        let children = || g.neighbors(v).iter().filter(|nb| parent[nb.node as usize] == v);
        let free_v: f64 = children().map(|nb| any[nb.node as usize]).sum();
        let mut best = free_v;
        for nb in children() {
            let c = nb.node as usize;
            let gain = free_v - any[c] + free[c] + g.edges()[nb.edge as usize].weight;
            if gain > best {
                best = gain;
                pick[v] = c;
            }
        }
        free[v] = free_v;
        any[v] = best;
    }
    let mut chosen = Vec::new();
    let mut may_match = vec![true; n];
    for &v in &order {
        if may_match[v] && pick[v] != usize::MAX {
            chosen.push(parent_edge[pick[v]]);
            may_match[pick[v]] = false;
        }
    }
    Ok(OptimalResult::exact(Method::TreeDp, g, chosen))
}

pub const DEFAULT_MAX_EDGES: usize = 22;

/// Exact optimum by branch and bound over edges in descending weight order,
/// pruning with half the sum of each free node's heaviest remaining edge.
pub fn optimal_exhaustive(g: &WeightedGraph, max_edges: usize) -> Result<OptimalResult> {
    let m = g.num_edges();
    if m > max_edges {
        return Err(Error::TooLarge { edges: m, cap: max_edges });
    }
    let (local, edges) = compact(g)?;
    let mut s = Search {
        edges: &edges,
        best: 0.0,
        best_set: Vec::new(),
        stack: Vec::new(),
        scratch: vec![0.0; local],
    };
    // greedy seeds the incumbent
    let seed = greedy_match(g);
    s.best = seed.total_weight;
    s.best_set = seed
        .matched_edges
        .iter()
        .map(|me| g.find_edge(me.i, me.j).expect("matched edge exists"))
        .collect();
    s.dfs(0, 0, 0.0);
    let mut set = s.best_set;
    set.sort_unstable();
    Ok(OptimalResult::exact(Method::Exhaustive, g, set))
}

struct LocalEdge {
    a: usize,
    b: usize,
    w: f64,
    original: usize,
}

/// Relabels edge endpoints to `0..k` (k <= 64) and sorts edges heaviest first.
fn compact(g: &WeightedGraph) -> Result<(usize, Vec<LocalEdge>)> {
    let mut id = vec![usize::MAX; g.n()];
    let mut next = 0;
    let mut edges = Vec::with_capacity(g.num_edges());
    for (idx, e) in g.edges().iter().enumerate() {
        let mut local = |v: usize| {
            if id[v] == usize::MAX {
                id[v] = next;
                next += 1;
            }
            id[v]
        };
        let (a, b) = (local(e.u as usize), local(e.v as usize));
        edges.push(LocalEdge { a, b, w: e.weight, original: idx });
    }
    if next > 64 {
        return Err(Error::TooLarge { edges: g.num_edges(), cap: 32 });
    }
    edges.sort_by(|x, y| y.w.total_cmp(&x.w).then(x.original.cmp(&y.original)));
    Ok((next, edges))
}

struct Search<'a> {
    edges: &'a [LocalEdge],
    best: f64,
    best_set: Vec<usize>,
    stack: Vec<usize>,
    scratch: Vec<f64>,
}

impl Search<'_> {
    fn bound(&mut self, k: usize, used: u64) -> f64 {
        self.scratch.iter_mut().for_each(|x| *x = 0.0);
        for e in &self.edges[k..] {
            if used & (1 << e.a) == 0 && used & (1 << e.b) == 0 {
                self.scratch[e.a] = self.scratch[e.a].max(e.w);
                self.scratch[e.b] = self.scratch[e.b].max(e.w);
            }
        }
        0.5 * self.scratch.iter().sum::<f64>()
    }

    fn dfs(&mut self, k: usize, used: u64, current: f64) {
        if current > self.best + 1e-12 {
            self.best = current;
            self.best_set = self.stack.iter().map(|&i| self.edges[i].original).collect();
        }
        if k == self.edges.len() || current + self.bound(k, used) <= self.best + 1e-12 {
            return;
        }
        let e = &self.edges[k];
        let mask = 1u64 << e.a | 1u64 << e.b;
        if used & mask == 0 {
            self.stack.push(k);
            self.dfs(k + 1, used | mask, current + e.w);
            self.stack.pop();
        }
        self.dfs(k + 1, used, current);
    }
}

pub const MULTIUNIT_MAX_UNITS: u64 = 18;

/// Exact multi-unit optimum by depth-first search over integer allocations,
/// heaviest edges first, pruned with a per-node capacity-filling bound.
pub fn optimal_multiunit_exhaustive(g: &WeightedGraph) -> Result<OptimalResult> {
    let q = g
        .quantities()
        .ok_or_else(|| Error::InvalidInput("multi-unit optimum needs quantities".into()))?;
    let incident: u64 = (0..g.n()).filter(|&i| g.degree(i) > 0).map(|i| q[i] as u64).sum();
    if incident > MULTIUNIT_MAX_UNITS {
        return Err(Error::TooLarge {
            edges: g.num_edges(),
            cap: MULTIUNIT_MAX_UNITS as usize,
        });
    }
    let (local, edges) = compact(g)?;
    let mut residual = vec![0u32; local];
    for le in &edges {
        let orig = &g.edges()[le.original];
        residual[le.a] = q[orig.u as usize];
        residual[le.b] = q[orig.v as usize];
    }
    let mut s = MultiSearch {
        edges: &edges,
        best: -1.0,
        best_alloc: Vec::new(),
        alloc: vec![0; edges.len()],
    };
    let seed = greedy_match_multiunit(g)?;
    s.best = seed.total_weight;
    s.best_alloc = vec![0; edges.len()];
    for me in &seed.matched_edges {
        let e = g.find_edge(me.i, me.j).expect("matched edge exists");
        let pos = edges.iter().position(|le| le.original == e).expect("present");
        s.best_alloc[pos] = me.units;
    }
    s.dfs(0, &mut residual, 0.0);
    let mut matched: Vec<MatchedEdge> = edges
        .iter()
        .zip(&s.best_alloc)
        .filter(|(_, &x)| x > 0)
        .map(|(le, &x)| {
            let e = &g.edges()[le.original];
            MatchedEdge {
                i: e.u as usize,
                j: e.v as usize,
                units: x,
                weight: e.weight,
            }
        })
        .collect();
    matched.sort_by_key(|m| (m.i, m.j));
    Ok(OptimalResult {
        total_weight: matched.iter().map(|m| m.weight * m.units as f64).sum(),
        matched_edges: Some(matched),
        method: Method::MultiunitExhaustive,
    })
}

struct MultiSearch<'a> {
    edges: &'a [LocalEdge],
    best: f64,
    best_alloc: Vec<u32>,
    alloc: Vec<u32>,
}

impl MultiSearch<'_> {
    fn bound(&self, k: usize, residual: &[u32]) -> f64 {
        let mut fill = residual.to_vec();
        let mut total = 0.0;
        // edges are heaviest first, so scanning in order fills each node greedily
        for e in &self.edges[k..] {
            let cap = residual[e.a].min(residual[e.b]);
            for v in [e.a, e.b] {
                let x = cap.min(fill[v]);
                fill[v] -= x;
                total += e.w * x as f64;
            }
        }
        0.5 * total
    }

    fn dfs(&mut self, k: usize, residual: &mut [u32], current: f64) {
        if current > self.best + 1e-12 {
            self.best = current;
            self.best_alloc.clone_from(&self.alloc);
        }
        if k == self.edges.len() || current + self.bound(k, residual) <= self.best + 1e-12 {
            return;
        }
        let (a, b, w) = (self.edges[k].a, self.edges[k].b, self.edges[k].w);
        let top = residual[a].min(residual[b]);
        for x in (0..=top).rev() {
            residual[a] -= x;
            residual[b] -= x;
            self.alloc[k] = x;
            self.dfs(k + 1, residual, current + w * x as f64);
            self.alloc[k] = 0;
            residual[a] += x;
            residual[b] += x;
        }
    }
}

#[cfg(test)]
mod tests;
