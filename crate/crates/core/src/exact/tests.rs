use proptest::prelude::*;

use super::*;
use crate::graph::{generate_grid2d, generate_line};
use crate::weights::WeightModel;

/// Brute force over every subset of edges.
fn brute_force(g: &WeightedGraph) -> f64 {
    let m = g.num_edges();
    assert!(m <= 20);
    let mut best = 0.0f64;
    for mask in 0u32..1 << m {
        let mut used = vec![false; g.n()];
        let mut total = 0.0;
        let mut ok = true;
        for e in 0..m {
            if mask >> e & 1 == 1 {
                let (a, b) = g.edges()[e].endpoints();
                if used[a] || used[b] {
                    ok = false;
                    break;
                }
                used[a] = true;
                used[b] = true;
                total += g.edges()[e].weight;
            }
        }
        if ok {
            best = best.max(total);
        }
    }
    best
}

/// Brute force over all integer allocations.
fn brute_force_multiunit(g: &WeightedGraph) -> f64 {
    fn rec(g: &WeightedGraph, k: usize, res: &mut Vec<u32>) -> f64 {
        if k == g.num_edges() {
            return 0.0;
        }
        let (a, b) = g.edges()[k].endpoints();
        let mut best = 0.0f64;
        for x in 0..=res[a].min(res[b]) {
            res[a] -= x;
            res[b] -= x;
            best = best.max(x as f64 * g.edges()[k].weight + rec(g, k + 1, res));
            res[a] += x;
            res[b] += x;
        }
        best
    }
    rec(g, 0, &mut g.quantities().unwrap().to_vec())
}

fn path(weights: &[f64]) -> WeightedGraph {
    let edges: Vec<_> = weights.iter().enumerate().map(|(i, &w)| (i, i + 1, w)).collect();
    WeightedGraph::from_weighted_edges(weights.len() + 1, &edges).unwrap()
}

fn assert_valid(r: &OptimalResult, g: &WeightedGraph) {
    let edges = r.matched_edges.clone().unwrap();
    let outcome = crate::greedy::MatchingOutcome {
        matched_edges: edges,
        total_weight: r.total_weight,
        rounds: 0,
        trace: None,
    };
    outcome.validate(g).unwrap();
}

#[test]
fn worst_case_path_optimum_uses_side_edges() {
    let g = path(&[1.0, 1.001, 1.0]);
    let r = optimal_path_dp(&g).unwrap();
    assert_eq!(r.total_weight, 2.0);
    let mut pairs: Vec<_> = r.matched_edges.unwrap().iter().map(|m| (m.i, m.j)).collect();
    pairs.sort_unstable();
    assert_eq!(pairs, vec![(0, 1), (2, 3)]);
}

#[test]
fn small_exact_examples() {
    assert_eq!(optimal_path_dp(&path(&[4.0])).unwrap().total_weight, 4.0);
    let star = WeightedGraph::from_weighted_edges(4, &[(0, 1, 1.0), (0, 2, 2.0), (0, 3, 3.0)]).unwrap();
    assert_eq!(optimal_tree_dp(&star).unwrap().total_weight, 3.0);
    let tri = WeightedGraph::from_weighted_edges(3, &[(0, 1, 3.0), (1, 2, 2.0), (0, 2, 2.0)]).unwrap();
    assert_eq!(optimal_exhaustive(&tri, 22).unwrap().total_weight, 3.0);
    let c4 = WeightedGraph::from_weighted_edges(4, &[(0, 1, 1.0), (1, 2, 2.0), (2, 3, 1.0), (3, 0, 2.0)]).unwrap();
    assert_eq!(optimal_exhaustive(&c4, 22).unwrap().total_weight, 4.0);
    let empty = WeightedGraph::from_weighted_edges(3, &[]).unwrap();
    assert_eq!(optimal_exhaustive(&empty, 22).unwrap().total_weight, 0.0);
}

#[test]
fn family_and_size_errors() {
    let tri = WeightedGraph::from_weighted_edges(3, &[(0, 1, 3.0), (1, 2, 2.0), (0, 2, 2.0)]).unwrap();
    assert!(matches!(optimal_path_dp(&tri), Err(Error::WrongFamily { .. })));
    assert!(matches!(optimal_tree_dp(&tri), Err(Error::WrongFamily { .. })));
    assert!(matches!(decomposition_bound_instance(&tri), Err(Error::WrongFamily { .. })));
    let big = path(&[1.0; 23]);
    assert!(matches!(optimal_exhaustive(&big, 22), Err(Error::TooLarge { .. })));
    assert!(matches!(multiunit_bound(&big), Err(Error::InvalidInput(_))));
}

#[test]
fn decomposition_instance_examples() {
    let (v1, v2) = (1.0, 2.5);
    let pattern = [v1, v2, v1, v2, v2, v2, v1, v2, v1];
    let r = decomposition_bound_instance(&path(&pattern)).unwrap();
    assert_eq!(r.total_weight, v1 + 4.0 * v2);
    assert_eq!(decomposition_bound_weights(&pattern, &[v1, v2]).unwrap(), v1 + 4.0 * v2);
    assert!(decomposition_bound_weights(&[1.0, 3.0], &[1.0, 2.0]).is_err());
    for n in 2..12 {
        let b = decomposition_bound_weights(&vec![v1; n - 1], &[v1]).unwrap();
        assert_eq!(b, (n - 1).div_ceil(2) as f64 * v1);
    }
}

#[test]
fn decomposition_expected_examples() {
    let k1 = WeightModel::uniform(vec![3.0]).unwrap();
    assert_eq!(decomposition_bound_expected(10, &k1), 15.0);
    let k2 = WeightModel::uniform(vec![1.0, 2.0]).unwrap();
    assert!((decomposition_bound_expected(6, &k2) - 5.0).abs() < 1e-12);
}

#[test]
fn decomposition_expected_dominates_mean_optimum() {
    let k2 = WeightModel::uniform(vec![1.0, 2.0]).unwrap();
    let n = 10_000;
    let mean: f64 = (0..10)
        .map(|s| optimal_path_dp(&generate_line(n, &k2, s).unwrap()).unwrap().total_weight)
        .sum::<f64>()
        / 10.0;
    assert!(mean <= decomposition_bound_expected(n, &k2));
}

#[test]
fn single_level_decomposition_is_tight() {
    let k1 = WeightModel::uniform(vec![1.0]).unwrap();
    let n = 10_000;
    let opt = optimal_path_dp(&generate_line(n, &k1, 0).unwrap()).unwrap().total_weight;
    let ratio = opt / decomposition_bound_expected(n, &k1);
    assert!((ratio - 1.0).abs() < 0.02, "{ratio}");
}

#[test]
fn neighbor_max_examples() {
    assert_eq!(neighbor_max_bound(&path(&[2.0])).total_weight, 2.0);
    let delta = 0.4;
    let m = WeightModel::two_level(delta).unwrap();
    let side = 400;
    let g = generate_grid2d(side, &m, 0).unwrap();
    let per_node = neighbor_max_bound_expected(&g, &m) / (side * side) as f64;
    let target = (16.0 + 15.0 * delta) / 32.0;
    assert!((per_node - target).abs() / target < 0.005, "{per_node} vs {target}");
}

#[test]
fn degree_mixtures_agree_with_fixed_degrees() {
    let m = WeightModel::new(vec![1.0, 2.0, 4.0], vec![0.2, 0.5, 0.3]).unwrap();
    // a degree-3 node: 1/2 E[max of 3]
    let direct = 0.5 * expected_max_neighbor_weight(3, &m);
    let f = [0.2f64, 0.7, 1.0];
    let manual = 0.5 * (1.0 * f[0].powi(3) + 2.0 * (f[1].powi(3) - f[0].powi(3)) + 4.0 * (1.0 - f[1].powi(3)));
    assert!((direct - manual).abs() < 1e-12);
    // large-n binomial approaches Poisson
    let b = neighbor_max_expected_binomial(1_000_000, 2.0 / 1_000_000.0, &m);
    let p = neighbor_max_expected_poisson(2.0, &m);
    assert!((b - p).abs() < 1e-5);
}

#[test]
fn multiunit_bound_examples() {
    let g = path(&[3.0]).with_quantities(vec![2, 3]).unwrap();
    assert_eq!(multiunit_bound(&g).unwrap().total_weight, 6.0);
    let star = WeightedGraph::from_weighted_edges(4, &[(0, 1, 3.0), (0, 2, 2.0), (0, 3, 1.0)])
        .unwrap()
        .with_quantities(vec![5, 2, 2, 2])
        .unwrap();
    // centre fills 2*3 + 2*2 + 1*1 = 11, each leaf sends its own edge twice: 6 + 4 + 2
    assert_eq!(multiunit_bound(&star).unwrap().total_weight, 11.5);
    assert_eq!(optimal_multiunit_exhaustive(&star).unwrap().total_weight, 11.0);
}

fn arb_graph(max_n: usize, max_edges: usize) -> impl Strategy<Value = WeightedGraph> {
    (2..max_n).prop_flat_map(move |n| {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        (Just(pairs.clone()), proptest::sample::subsequence(pairs, 0..=max_edges.min(n * (n - 1) / 2)), proptest::collection::vec(0u16..4, max_edges))
            .prop_map(move |(_, chosen, levels)| {
                let edges = chosen.into_iter().zip(levels).map(|((i, j), l)| (i, j, l)).collect();
                WeightedGraph::from_levels(n, edges, vec![1.0, 1.5, 2.0, 7.0]).unwrap()
            })
    })
}

fn arb_tree(max_n: usize) -> impl Strategy<Value = WeightedGraph> {
    (2..max_n).prop_flat_map(|n| {
        (proptest::collection::vec(any::<proptest::sample::Index>(), n - 1), proptest::collection::vec(0u16..3, n - 1))
            .prop_map(move |(parents, levels)| {
                let edges = parents
                    .iter()
                    .zip(levels)
                    .enumerate()
                    .map(|(c, (p, l))| (p.index(c + 1), c + 1, l))
                    .collect();
                WeightedGraph::from_levels(n, edges, vec![1.0, 2.0, 3.0]).unwrap()
            })
    })
}

proptest! {
    #[test]
    fn path_dp_matches_brute_force(levels in proptest::collection::vec(0u16..3, 1..=12)) {
        let edges = levels.iter().enumerate().map(|(i, &l)| (i, i + 1, l)).collect();
        let g = WeightedGraph::from_levels(levels.len() + 1, edges, vec![1.0, 1.7, 3.0]).unwrap();
        let dp = optimal_path_dp(&g).unwrap();
        assert_valid(&dp, &g);
        prop_assert!((dp.total_weight - brute_force(&g)).abs() < 1e-9);
        prop_assert!((optimal_tree_dp(&g).unwrap().total_weight - dp.total_weight).abs() < 1e-9);
        let bound = decomposition_bound_instance(&g).unwrap().total_weight;
        prop_assert!(bound + 1e-9 >= dp.total_weight);
    }

    #[test]
    fn decomposition_dominates_longer_paths(levels in proptest::collection::vec(0u16..4, 14)) {
        let edges = levels.iter().enumerate().map(|(i, &l)| (i, i + 1, l)).collect();
        let g = WeightedGraph::from_levels(15, edges, vec![1.0, 1.2, 2.0, 5.0]).unwrap();
        let dp = optimal_path_dp(&g).unwrap().total_weight;
        prop_assert!(decomposition_bound_instance(&g).unwrap().total_weight + 1e-9 >= dp);
    }

    #[test]
    fn tree_dp_matches_brute_force(g in arb_tree(15)) {
        let r = optimal_tree_dp(&g).unwrap();
        assert_valid(&r, &g);
        prop_assert!((r.total_weight - brute_force(&g)).abs() < 1e-9);
        prop_assert!((optimal_exhaustive(&g, 22).unwrap().total_weight - r.total_weight).abs() < 1e-9);
    }

    #[test]
    fn exhaustive_matches_brute_force(g in arb_graph(9, 18)) {
        let r = optimal_exhaustive(&g, 22).unwrap();
        assert_valid(&r, &g);
        let opt = brute_force(&g);
        prop_assert!((r.total_weight - opt).abs() < 1e-9);
        prop_assert!(neighbor_max_bound(&g).total_weight + 1e-9 >= opt);
        let greedy = crate::greedy::greedy_match(&g).total_weight;
        prop_assert!(2.0 * greedy + 1e-9 >= opt);
    }

    #[test]
    fn multiunit_bound_dominates_exact(g in arb_graph(7, 10), caps in proptest::collection::vec(1u32..4, 7)) {
        let q = caps[..g.n()].to_vec();
        if q.iter().sum::<u32>() > 18 {
            return Ok(());
        }
        let g = g.with_quantities(q).unwrap();
        let exact = optimal_multiunit_exhaustive(&g).unwrap();
        assert_valid(&exact, &g);
        prop_assert!((exact.total_weight - brute_force_multiunit(&g)).abs() < 1e-9);
        prop_assert!(multiunit_bound(&g).unwrap().total_weight + 1e-9 >= exact.total_weight);
        let greedy = crate::greedy::greedy_match_multiunit(&g).unwrap().total_weight;
        prop_assert!(greedy <= exact.total_weight + 1e-9);
    }

    #[test]
    fn unit_quantities_reduce_to_neighbor_max(g in arb_graph(9, 18)) {
        let n = g.n();
        let plain = neighbor_max_bound(&g).total_weight;
        let unit = multiunit_bound(&g.with_quantities(vec![1; n]).unwrap()).unwrap().total_weight;
        prop_assert!((plain - unit).abs() < 1e-12);
    }
}
