use proptest::prelude::*;

use super::*;
use crate::graph::{generate_gnp, generate_grid2d, generate_line};
use crate::weights::WeightModel;

/// Sequential greedy over the strict global edge order induced by the tie
/// rule, with capacities. Independent of the round engine.
fn sequential_oracle(g: &WeightedGraph, tie: TieRule, caps: Option<&[u32]>) -> (f64, Vec<(usize, usize, u32)>) {
    let mut order: Vec<usize> = (0..g.num_edges()).collect();
    let key = |e: usize| {
        let (a, b) = g.edges()[e].endpoints();
        let (lo, hi) = (a.min(b) as i64, a.max(b) as i64);
        match tie {
            TieRule::Id => (g.edges()[e].level, hi, lo),
            TieRule::Left => (g.edges()[e].level, -lo, -hi),
        }
    };
    order.sort_by_key(|&e| std::cmp::Reverse(key(e)));
    let mut res: Vec<u32> = (0..g.n()).map(|i| caps.map_or(1, |c| c[i])).collect();
    let mut total = 0.0;
    let mut picked = Vec::new();
    for e in order {
        let (a, b) = g.edges()[e].endpoints();
        let units = res[a].min(res[b]);
        if units > 0 {
            res[a] -= units;
            res[b] -= units;
            total += units as f64 * g.edges()[e].weight;
            picked.push((a.min(b), a.max(b), units));
        }
    }
    picked.sort_unstable();
    (total, picked)
}

fn edge_set(o: &MatchingOutcome) -> Vec<(usize, usize, u32)> {
    let mut v: Vec<_> = o.matched_edges.iter().map(|m| (m.i.min(m.j), m.i.max(m.j), m.units)).collect();
    v.sort_unstable();
    v
}

fn path(weights: &[f64]) -> WeightedGraph {
    let edges: Vec<_> = weights.iter().enumerate().map(|(i, &w)| (i, i + 1, w)).collect();
    WeightedGraph::from_weighted_edges(weights.len() + 1, &edges).unwrap()
}

#[test]
fn worst_case_path_takes_the_middle_edge() {
    let eps = 1e-3;
    let o = greedy_match(&path(&[1.0, 1.0 + eps, 1.0]));
    assert_eq!(edge_set(&o), vec![(1, 2, 1)]);
    assert!((o.total_weight - (1.0 + eps)).abs() < 1e-12);
}

#[test]
fn single_edge_and_empty_graph() {
    let o = greedy_match(&path(&[2.5]));
    assert_eq!((o.total_weight, o.rounds), (2.5, 1));
    let empty = WeightedGraph::from_weighted_edges(5, &[]).unwrap();
    let o = greedy_match(&empty);
    assert_eq!((o.matched_edges.len(), o.rounds), (0, 0));
}

#[test]
fn equal_weights_with_left_priority() {
    let g = path(&[1.0, 1.0, 1.0]);
    let o = greedy_match_with(&g, &GreedyOptions::default().with_tie_rule(TieRule::Left));
    assert_eq!(edge_set(&o), vec![(0, 1, 1), (2, 3, 1)]);
    // id priority starts from the right end instead
    let o = greedy_match(&g);
    assert_eq!(edge_set(&o), vec![(0, 1, 1), (2, 3, 1)]);
    let g5 = path(&[1.0; 4]);
    let left = greedy_match_with(&g5, &GreedyOptions::default().with_tie_rule(TieRule::Left));
    assert_eq!(edge_set(&left), vec![(0, 1, 1), (2, 3, 1)]);
    assert_eq!(edge_set(&greedy_match(&g5)), vec![(1, 2, 1), (3, 4, 1)]);
}

#[test]
fn multiunit_examples() {
    let g = path(&[3.0]).with_quantities(vec![2, 3]).unwrap();
    let o = greedy_match_multiunit(&g).unwrap();
    assert_eq!(edge_set(&o), vec![(0, 1, 2)]);
    assert_eq!(o.total_weight, 6.0);

    let g = path(&[1.0, 1.0]).with_quantities(vec![1, 2, 1]).unwrap();
    let o = greedy_match_multiunit_with(&g, &GreedyOptions::default().with_tie_rule(TieRule::Left).with_trace()).unwrap();
    assert_eq!(edge_set(&o), vec![(0, 1, 1), (1, 2, 1)]);
    assert_eq!(o.total_weight, 2.0);
    assert_eq!(o.rounds, 2);
    assert_eq!(o.trace.as_ref().unwrap().iter().map(|t| t.matches).collect::<Vec<_>>(), vec![1, 1]);
    assert!(o.trace_csv().unwrap().starts_with("round,proposals,matches\n1,"));

    assert!(greedy_match_multiunit(&path(&[1.0])).is_err());
}

#[test]
fn unit_capacities_reproduce_single_unit() {
    let m = WeightModel::uniform(vec![1.0, 2.0, 3.0]).unwrap();
    for seed in 0..20 {
        let g = generate_gnp(300, 0.02, &m, seed).unwrap();
        let single = greedy_match(&g);
        let multi = greedy_match_multiunit(&g.clone().with_quantities(vec![1; 300]).unwrap()).unwrap();
        assert_eq!(single, multi);
    }
}

#[test]
fn worker_count_does_not_change_outcome() {
    let m = WeightModel::uniform(vec![1.0, 2.0]).unwrap();
    let g = generate_grid2d(200, &m, 3).unwrap();
    let base = greedy_match_with(&g, &GreedyOptions::default().with_trace());
    for workers in [0, 2, 4] {
        let o = greedy_match_with(&g, &GreedyOptions::default().with_trace().with_workers(workers));
        assert_eq!(o, base);
    }
}

#[test]
fn outcome_json_schema() {
    let o = greedy_match(&path(&[1.0, 2.0]));
    let v: serde_json::Value = serde_json::to_value(&o).unwrap();
    assert!(v.get("matched_edges").is_some() && v.get("total_weight").is_some() && v.get("rounds").is_some());
    let back: MatchingOutcome = serde_json::from_value(v).unwrap();
    assert_eq!(back, o);
}

#[test]
fn validation_catches_overlaps() {
    let g = path(&[1.0, 1.0]);
    let bad = MatchingOutcome {
        matched_edges: vec![
            MatchedEdge { i: 0, j: 1, units: 1, weight: 1.0 },
            MatchedEdge { i: 1, j: 2, units: 1, weight: 1.0 },
        ],
        total_weight: 2.0,
        rounds: 1,
        trace: None,
    };
    assert!(bad.validate(&g).is_err());
}

#[test]
fn line_rounds_stay_small() {
    let m = WeightModel::uniform(vec![1.0, 2.0]).unwrap();
    let o = generate_line(100_000, &m, 1).map(|g| greedy_match(&g)).unwrap();
    assert!(o.rounds < 40, "{}", o.rounds);
}

fn arb_graph(max_n: usize) -> impl Strategy<Value = (WeightedGraph, Vec<u32>)> {
    (2..max_n).prop_flat_map(|n| {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        let m = pairs.len();
        (
            Just(n),
            Just(pairs),
            proptest::collection::vec(proptest::option::weighted(0.4, 0u16..3), m),
            proptest::collection::vec(1u32..4, n),
        )
            .prop_map(|(n, pairs, levels, caps)| {
                let edges = pairs
                    .into_iter()
                    .zip(levels)
                    .filter_map(|((i, j), l)| l.map(|l| (i, j, l)))
                    .collect();
                (WeightedGraph::from_levels(n, edges, vec![1.0, 2.0, 3.5]).unwrap(), caps)
            })
    })
}

proptest! {
    #[test]
    fn engine_equals_sequential_oracle((g, caps) in arb_graph(9), left in any::<bool>()) {
        let tie = if left { TieRule::Left } else { TieRule::Id };
        let opts = GreedyOptions::default().with_tie_rule(tie);
        let o = greedy_match_with(&g, &opts);
        prop_assert!(o.validate(&g).is_ok());
        prop_assert!(o.is_maximal(&g));
        let (total, picked) = sequential_oracle(&g, tie, None);
        prop_assert_eq!(edge_set(&o), picked);
        prop_assert!((o.total_weight - total).abs() < 1e-9);

        let gq = g.clone().with_quantities(caps.clone()).unwrap();
        let mo = greedy_match_multiunit_with(&gq, &opts).unwrap();
        prop_assert!(mo.validate(&gq).is_ok());
        prop_assert!(mo.is_maximal(&gq));
        let (mtotal, mpicked) = sequential_oracle(&gq, tie, Some(&caps));
        prop_assert_eq!(edge_set(&mo), mpicked);
        prop_assert!((mo.total_weight - mtotal).abs() < 1e-9);
    }

    #[test]
    fn every_round_commits_a_match((g, _) in arb_graph(10)) {
        let o = greedy_match_with(&g, &GreedyOptions::default().with_trace());
        let trace = o.trace.unwrap();
        prop_assert_eq!(trace.len() as u32, o.rounds);
        prop_assert!(trace.iter().all(|t| t.matches >= 1));
    }
}
