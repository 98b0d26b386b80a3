//! Proposal probabilities on the Poisson Galton–Watson tree `T(d)` and the
//! expected matched weight at its root.
//!
//! A child joined to its parent by a level-`k` edge proposes upward with
//! probability `y_k`, where
//!
//! ```text
//! y_k = e^{-(p_k + sum_{j>k} p_j y_j) d} sum_{i>=0} (p_k d)^i (1 - (1 - y_k)^{i+1}) / ((i+1)! y_k)
//! ```
//!
//! Levels are solved from the top down, each by bisection on `(0, 1]`.

use rand::seq::SliceRandom;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::greedy::{greedy_match_with, GreedyOptions, TieRule};
use crate::rng::{rng_from_seed, run_samples, Rng};
use crate::stats::Summary;
use crate::weights::WeightModel;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixedPointSolution {
    pub d: f64,
    pub y: Vec<f64>,
    pub residuals: Vec<f64>,
}

/// Right-hand side for level `k` (0-based) at candidate `y`, given
/// `higher = sum_{j>k} p_j y_j`. The series stops once a term past its peak
/// falls below `tolerance * 1e-3`.
pub fn fixed_point_rhs(y: f64, k: usize, d: f64, model: &WeightModel, higher: f64, tolerance: f64) -> f64 {
    let pk = model.probs()[k];
    let b = pk * d;
    let cutoff = tolerance * 1e-3;
    // (1 - (1-y)^{i+1}) / y, accurate for small y
    let ratio = |i: usize| -> f64 {
        if y >= 1.0 {
            1.0
        } else {
            -((i as f64 + 1.0) * (-y).ln_1p()).exp_m1() / y
        }
    };
    let mut sum = 0.0;
    let mut coeff = 1.0; // b^i / (i+1)!
    let mut i = 0usize;
    loop {
        let term = coeff * ratio(i);
        sum += term;
        if (i as f64) > b && term < cutoff {
            break;
        }
        i += 1;
        coeff *= b / (i as f64 + 1.0);
        if i > 10_000 {
            break;
        }
    }
    (-(pk + higher) * d).exp() * sum
}

/// Closed form of the same right-hand side: `A (1 - e^{-b y}) / (b y)`.
pub fn fixed_point_rhs_closed(y: f64, k: usize, d: f64, model: &WeightModel, higher: f64) -> f64 {
    let b = model.probs()[k] * d;
    let a = (-d * higher).exp();
    if b * y == 0.0 {
        a
    } else {
        a * -(-b * y).exp_m1() / (b * y)
    }
}

pub const DEFAULT_TOLERANCE: f64 = 1e-10;

pub fn solve_tree_fixed_point(d: f64, model: &WeightModel, tolerance: f64) -> Result<FixedPointSolution> {
    if !(d >= 0.0 && d.is_finite()) {
        return Err(Error::InvalidParameter(format!("mean degree must be finite and >= 0, got {d}")));
    }
    if !(tolerance > 0.0) {
        return Err(Error::InvalidParameter(format!("tolerance must be > 0, got {tolerance}")));
    }
    let k = model.k();
    let mut y = vec![1.0; k];
    let mut residuals = vec![0.0; k];
    let mut higher = 0.0;
    for level in (0..k).rev() {
        let f = |t: f64| t - fixed_point_rhs(t, level, d, model, higher, tolerance);
        let root = if f(1.0) <= 0.0 {
            1.0
        } else {
            let (mut lo, mut hi) = (0.0f64, 1.0f64);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if f(mid) < 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            if f(hi).abs() < f(lo).abs() || lo == 0.0 {
                hi
            } else {
                lo
            }
        };
        let residual = f(root).abs();
        if !(residual < tolerance.max(1e-15)) {
            return Err(Error::Numerical(format!(
                "bisection for level {} stalled with residual {residual:e}",
                level + 1
            )));
        }
        y[level] = root;
        residuals[level] = residual;
        higher += model.probs()[level] * root;
    }
    Ok(FixedPointSolution { d, y, residuals })
}

impl FixedPointSolution {
    /// Sign changes of `y - rhs(y)` for level `k` over `points` evenly spaced
    /// values in `(0, 1]`, holding the higher levels at their solutions.
    pub fn sign_changes(&self, model: &WeightModel, k: usize, points: usize) -> usize {
        let higher: f64 = (k + 1..model.k()).map(|j| model.probs()[j] * self.y[j]).sum();
        let f = |t: f64| t - fixed_point_rhs(t, k, self.d, model, higher, DEFAULT_TOLERANCE);
        let mut changes = 0;
        let mut prev = f(1.0 / points as f64).signum();
        for i in 2..=points {
            let s = f(i as f64 / points as f64).signum();
            if s != 0.0 && s != prev {
                changes += 1;
                prev = s;
            }
        }
        changes
    }

    /// Probability the root is matched on a level-`k` edge.
    pub fn root_match_probabilities(&self, model: &WeightModel) -> Vec<f64> {
        let p = model.probs();
        (0..model.k())
            .map(|k| {
                let higher: f64 = (k + 1..model.k()).map(|j| p[j] * self.y[j]).sum();
                (-self.d * higher).exp() * -(-self.d * p[k] * self.y[k]).exp_m1()
            })
            .collect()
    }

    /// Expected half matched weight at the root.
    pub fn expected_root_weight(&self, model: &WeightModel) -> f64 {
        self.root_match_probabilities(model)
            .iter()
            .zip(model.values())
            .map(|(pm, v)| pm * v / 2.0)
            .sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RootWeightMode {
    Analytic,
    MonteCarlo,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootWeight {
    pub value: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ci_halfwidth: Option<f64>,
    /// `d >= 1`: the tree is only an approximation of the sparse random graph.
    pub approximate: bool,
    /// Monte Carlo trees cut short by the depth or size cap.
    pub truncated_trees: usize,
    /// Empirical `y_k` from Monte Carlo runs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub empirical_y: Option<Vec<f64>>,
}

/// Node cap per Monte Carlo tree.
pub const TREE_NODE_CAP: usize = 100_000;

/// Depth at which a subcritical tree survives with probability below 1e-9
/// (`d^h < 1e-9`); supercritical trees use a fixed depth and the node cap.
pub fn truncation_depth(d: f64) -> usize {
    if d <= 0.0 {
        1
    } else if d < 1.0 {
        ((1e-9f64).ln() / d.ln()).ceil().max(1.0) as usize
    } else {
        64
    }
}

/// A forest of independent `T(d)` samples with randomly permuted ids.
pub struct TreeForest {
    pub graph: WeightedGraph,
    pub roots: Vec<usize>,
    pub truncated: usize,
}

pub fn sample_tree_forest(d: f64, model: &WeightModel, trees: usize, rng: &mut Rng) -> Result<TreeForest> {
    let offspring = if d > 0.0 {
        Some(Poisson::new(d).map_err(|e| Error::InvalidParameter(e.to_string()))?)
    } else {
        None
    };
    let depth_cap = truncation_depth(d);
    let mut edges: Vec<(usize, usize, u16)> = Vec::new();
    let mut roots = Vec::with_capacity(trees);
    let mut n = 0usize;
    let mut truncated = 0;
    for _ in 0..trees {
        let root = n;
        n += 1;
        roots.push(root);
        let mut frontier = vec![root];
        let mut size = 1usize;
        let mut depth = 0;
        let mut cut = false;
        while !frontier.is_empty() {
            if depth == depth_cap {
                cut = true;
                break;
            }
            let mut next = Vec::new();
            for &parent in &frontier {
                let kids = offspring.as_ref().map_or(0, |o| o.sample(rng) as usize);
                for _ in 0..kids {
                    if size >= TREE_NODE_CAP {
                        cut = true;
                        break;
                    }
                    let child = n;
                    n += 1;
                    size += 1;
                    edges.push((parent, child, model.sample_level(rng)));
                    next.push(child);
                }
            }
            frontier = next;
            depth += 1;
        }
        truncated += cut as usize;
    }
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    let edges = edges.into_iter().map(|(a, b, l)| (perm[a], perm[b], l)).collect();
    let roots = roots.into_iter().map(|r| perm[r]).collect();
    Ok(TreeForest {
        graph: WeightedGraph::build(n, edges, model.values().to_vec()),
        roots,
        truncated,
    })
}

/// Per-batch Monte Carlo tallies.
struct TreeBatch {
    root_values: Vec<f64>,
    proposals: Vec<(u64, u64)>,
    truncated: usize,
}

fn run_tree_batch(d: f64, model: &WeightModel, trees: usize, seed: u64) -> Result<TreeBatch> {
    let mut rng = rng_from_seed(seed);
    let forest = sample_tree_forest(d, model, trees, &mut rng)?;
    let g = &forest.graph;
    let outcome = greedy_match_with(g, &GreedyOptions::default().with_tie_rule(TieRule::Id));
    let partners = outcome.partners(g.n());
    let level_between = |a: usize, b: usize| g.edges()[g.find_edge(a, b).expect("edge")].level;
    let mut root_values = Vec::with_capacity(trees);
    let mut proposals = vec![(0u64, 0u64); model.k()];
    for &root in &forest.roots {
        root_values.push(match partners[root] {
            Some(p) => g.edges()[g.find_edge(root, p).expect("edge")].weight / 2.0,
            None => 0.0,
        });
        for nb in g.neighbors(root) {
            let child = nb.node as usize;
            let up = g.edges()[nb.edge as usize].level;
            // the child stays silent only if it is matched below on an edge it ranks higher
            let silent = match partners[child] {
                Some(p) if p != root => {
                    let down = level_between(child, p);
                    down > up || (down == up && p > root)
                }
                _ => false,
            };
            proposals[up as usize].0 += 1;
            proposals[up as usize].1 += (!silent) as u64;
        }
    }
    Ok(TreeBatch {
        root_values,
        proposals,
        truncated: forest.truncated,
    })
}

const TREES_PER_BATCH: usize = 20_000;

/// Monte Carlo over `samples` independent trees, batched into forests.
pub fn monte_carlo_root_weight(d: f64, model: &WeightModel, samples: usize, seed: u64) -> Result<RootWeight> {
    if samples < 2 {
        return Err(Error::InvalidParameter("Monte Carlo needs at least 2 samples".into()));
    }
    let batches = samples.div_ceil(TREES_PER_BATCH);
    let results = run_samples(batches, seed, |b, s| {
        let trees = TREES_PER_BATCH.min(samples - b * TREES_PER_BATCH);
        run_tree_batch(d, model, trees, s)
    });
    let mut values = Vec::with_capacity(samples);
    let mut tallies = vec![(0u64, 0u64); model.k()];
    let mut truncated = 0;
    for r in results {
        let r = r?;
        values.extend(r.root_values);
        for (t, p) in tallies.iter_mut().zip(r.proposals) {
            t.0 += p.0;
            t.1 += p.1;
        }
        truncated += r.truncated;
    }
    let s = Summary::of(&values);
    Ok(RootWeight {
        value: s.mean,
        ci_halfwidth: Some(s.ci_halfwidth),
        approximate: d >= 1.0,
        truncated_trees: truncated,
        empirical_y: Some(
            tallies
                .iter()
                .map(|&(seen, up)| if seen == 0 { f64::NAN } else { up as f64 / seen as f64 })
                .collect(),
        ),
    })
}

pub fn expected_root_weight(
    d: f64,
    model: &WeightModel,
    mode: RootWeightMode,
    samples: usize,
    seed: u64,
) -> Result<RootWeight> {
    match mode {
        RootWeightMode::Analytic => {
            let sol = solve_tree_fixed_point(d, model, DEFAULT_TOLERANCE)?;
            Ok(RootWeight {
                value: sol.expected_root_weight(model),
                ci_halfwidth: None,
                approximate: d >= 1.0,
                truncated_trees: 0,
                empirical_y: None,
            })
        }
        RootWeightMode::MonteCarlo => monte_carlo_root_weight(d, model, samples, seed),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k2() -> WeightModel {
        WeightModel::uniform(vec![1.0, 2.0]).unwrap()
    }

    #[test]
    fn series_matches_closed_form() {
        let m = WeightModel::new(vec![1.0, 2.0, 5.0], vec![0.2, 0.3, 0.5]).unwrap();
        for d in [0.1, 1.0, 4.0, 10.0] {
            for y in [1e-6, 0.3, 0.9, 1.0] {
                for k in 0..3 {
                    let s = fixed_point_rhs(y, k, d, &m, 0.17, 1e-10);
                    let c = fixed_point_rhs_closed(y, k, d, &m, 0.17);
                    assert!((s - c).abs() < 1e-11, "d {d} y {y} k {k}: {s} vs {c}");
                }
            }
        }
    }

    #[test]
    fn zero_degree_gives_ones() {
        let sol = solve_tree_fixed_point(0.0, &k2(), 1e-10).unwrap();
        assert_eq!(sol.y, vec![1.0, 1.0]);
        assert_eq!(sol.expected_root_weight(&k2()), 0.0);
    }

    #[test]
    fn top_level_rhs_at_one() {
        let m = k2();
        let d: f64 = 3.0;
        let b = 0.5 * d;
        let rhs = fixed_point_rhs(1.0, 1, d, &m, 0.0, 1e-10);
        assert!((rhs - (1.0 - (-b).exp()) / b).abs() < 1e-12);
        assert!(rhs < 1.0);
    }

    #[test]
    fn solutions_are_unique_with_tiny_residuals() {
        let m = WeightModel::uniform(vec![1.0, 2.0, 3.0]).unwrap();
        for d in [0.2, 0.5, 0.9, 2.0, 5.0, 10.0] {
            let sol = solve_tree_fixed_point(d, &m, 1e-10).unwrap();
            for k in 0..3 {
                assert!(sol.residuals[k] < 1e-10);
                assert!(sol.y[k] > 0.0 && sol.y[k] <= 1.0);
                assert_eq!(sol.sign_changes(&m, k, 1000), 1, "d {d} level {k}");
            }
        }
    }

    #[test]
    fn small_degree_limit() {
        let sol = solve_tree_fixed_point(1e-6, &k2(), 1e-10).unwrap();
        assert!(sol.y.iter().all(|y| (y - 1.0).abs() < 1e-5));
        assert!(sol.expected_root_weight(&k2()) < 1e-5);
    }

    #[test]
    fn empirical_proposals_match_fixed_point() {
        let m = k2();
        let d = 0.5;
        let sol = solve_tree_fixed_point(d, &m, 1e-10).unwrap();
        let mc = monte_carlo_root_weight(d, &m, 1_000_000, 11).unwrap();
        let y = mc.empirical_y.unwrap();
        for (k, (got, want)) in y.iter().zip(&sol.y).enumerate() {
            assert!((got - want).abs() < 1e-3, "level {k}: {got} vs {want}");
        }
    }

    #[test]
    fn analytic_and_monte_carlo_modes_agree() {
        let m = k2();
        for (i, d) in [0.2, 0.5, 0.9].into_iter().enumerate() {
            let a = expected_root_weight(d, &m, RootWeightMode::Analytic, 0, 0).unwrap();
            let mc = expected_root_weight(d, &m, RootWeightMode::MonteCarlo, 200_000, i as u64).unwrap();
            let se = mc.ci_halfwidth.unwrap() / crate::stats::Z95;
            assert!((a.value - mc.value).abs() < 3.0 * se, "d {d}: {} vs {} (se {se})", a.value, mc.value);
            assert_eq!(mc.truncated_trees, 0);
        }
    }
}
