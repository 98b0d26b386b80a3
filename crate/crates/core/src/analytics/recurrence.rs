//! Linear recurrences `a_n = C + sum_s gamma_s a_{n-s}` for expected greedy
//! weight on lines and grid strips.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::decomposition_bound_expected;
use crate::graph::WeightedGraph;
use crate::greedy::{greedy_match_with, GreedyOptions, TieRule};
use crate::weights::WeightModel;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecurrenceSpec {
    pub constant_term: f64,
    /// `(lag, coefficient)` pairs; coefficients are non-negative and sum to 1.
    pub lag_coefficients: Vec<(usize, f64)>,
    /// Asymptotic `a_n / n = C / sum_s s gamma_s`.
    pub slope: f64,
}

impl RecurrenceSpec {
    pub fn new(constant_term: f64, lag_coefficients: Vec<(usize, f64)>) -> Result<Self> {
        if lag_coefficients.iter().any(|&(s, c)| s == 0 || !(c >= 0.0)) {
            return Err(Error::InvalidParameter("lags must be >= 1 with non-negative coefficients".into()));
        }
        let total: f64 = lag_coefficients.iter().map(|c| c.1).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!("recurrence coefficients sum to {total}, not 1")));
        }
        let mean_lag: f64 = lag_coefficients.iter().map(|&(s, c)| s as f64 * c).sum();
        Ok(RecurrenceSpec {
            constant_term,
            lag_coefficients,
            slope: constant_term / mean_lag,
        })
    }

    /// `a_0 .. a_{len-1}`: the given initial terms, then the recurrence, with
    /// terms at negative indices taken as 0.
    pub fn iterate(&self, initial: &[f64], len: usize) -> Vec<f64> {
        let mut a: Vec<f64> = initial.iter().copied().take(len).collect();
        while a.len() < len {
            let n = a.len();
            let next = self.constant_term
                + self
                    .lag_coefficients
                    .iter()
                    .filter(|&&(s, _)| s <= n)
                    .map(|&(s, c)| c * a[n - s])
                    .sum::<f64>();
            a.push(next);
        }
        a
    }
}

/// Expected greedy weight on a line of `nodes` nodes, by enumerating every
/// weight assignment. Exponential in `nodes`; capped at 16 edges.
pub fn expected_greedy_line_exact(model: &WeightModel, nodes: usize, tie: TieRule) -> Result<f64> {
    if nodes < 2 {
        return Ok(0.0);
    }
    let m = nodes - 1;
    let k = model.k();
    let configs = (k as f64).powi(m as i32);
    if m > 16 || configs > 5e6 {
        return Err(Error::TooLarge { edges: m, cap: 16 });
    }
    let mut levels = vec![0u16; m];
    let mut total = 0.0;
    let opts = GreedyOptions::default().with_tie_rule(tie);
    loop {
        let prob: f64 = levels.iter().map(|&l| model.probs()[l as usize]).product();
        let edges = levels.iter().enumerate().map(|(i, &l)| (i, i + 1, l)).collect();
        let g = WeightedGraph::from_levels(nodes, edges, model.values().to_vec())?;
        total += prob * greedy_match_with(&g, &opts).total_weight;
        // odometer over K^m assignments
        let mut pos = 0;
        loop {
            if pos == m {
                return Ok(total);
            }
            levels[pos] += 1;
            if (levels[pos] as usize) < k {
                break;
            }
            levels[pos] = 0;
            pos += 1;
        }
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Line recurrence: the two-level form for any `P`, or the uniform form for
/// any `K`. Other models are unsupported in closed form.
pub fn linear_recurrence(model: &WeightModel) -> Result<RecurrenceSpec> {
    let v = model.values();
    let p = model.probs();
    if model.k() == 2 {
        let (p1, p2) = (p[0], p[1]);
        let constant = p1 * p1 * v[0] + (p2 + p1 * p2) * v[1];
        let lag2 = p2 + p1 * p1;
        // fold rounding so the coefficients sum to exactly 1
        return RecurrenceSpec::new(constant, vec![(2, lag2), (3, 1.0 - lag2)]);
    }
    if !model.is_uniform() {
        return Err(Error::Unsupported(format!(
            "no closed-form line recurrence for non-uniform K = {}; estimate it by simulation",
            model.k()
        )));
    }
    let k = model.k();
    let kf = k as f64;
    let constant: f64 = (1..=k)
        .map(|j| {
            let beta = (kf - 1.0).powi((k - j) as i32) * (kf + 1.0).powi(j as i32 - 1) / kf.powi(k as i32);
            beta * v[j - 1]
        })
        .sum();
    let mut lags: Vec<(usize, f64)> = (1..=k)
        .map(|j| {
            let s: f64 = (j..=k).map(|i| i as f64 * binomial(i - 1, j - 1)).sum();
            (j + 1, s / kf.powi(j as i32 + 1))
        })
        .collect();
    let head: f64 = lags[..k - 1].iter().map(|l| l.1).sum();
    lags[k - 1].1 = 1.0 - head;
    RecurrenceSpec::new(constant, lags)
}

/// First terms `a_0 .. a_{K+1}` of the line sequence, by exact enumeration.
pub fn line_initial_terms(model: &WeightModel) -> Result<Vec<f64>> {
    (0..=model.k() + 1)
        .map(|nodes| expected_greedy_line_exact(model, nodes, TieRule::Left))
        .collect()
}

/// Asymptotic lower bound on the line performance ratio: recurrence slope
/// over the per-user expected decomposition bound.
pub fn pr_lower_bound_linear(model: &WeightModel) -> Result<f64> {
    let spec = linear_recurrence(model)?;
    Ok(spec.slope / decomposition_bound_expected(1, model))
}

/// Closed-form uniform-`K` ratio on raw values, which need not be distinct:
/// `sum v_k (K-1)^{K-k} / (K+1)^{K-k+1}` over `sum v_k K / ((2K+1-k)(2K-k))`.
pub fn uniform_pr_ratio(values: &[f64]) -> f64 {
    let k = values.len();
    let kf = k as f64;
    let (mut num, mut den) = (0.0, 0.0);
    for (idx, v) in values.iter().enumerate() {
        let j = idx + 1;
        num += v * (kf - 1.0).powi((k - j) as i32) / (kf + 1.0).powi((k - j + 1) as i32);
        den += v * kf / ((2.0 * kf + 1.0 - j as f64) * (2.0 * kf - j as f64));
    }
    num / den
}

/// `1 - ((K-1)/(K+1))^K`, the uniform-`K` ratio as all values coincide.
pub fn pr_linear_limit(k: usize) -> f64 {
    let kf = k as f64;
    1.0 - ((kf - 1.0) / (kf + 1.0)).powi(k as i32)
}

fn two_level_uniform(model: &WeightModel) -> Result<(f64, f64)> {
    if model.k() != 2 || !model.is_uniform() {
        return Err(Error::Unsupported(
            "grid and multi-unit analyses need two equally likely weight levels".into(),
        ));
    }
    Ok((model.values()[0], model.values()[1]))
}

/// Greedy recurrence on a `2 x n` grid strip; with `V = (1, 1 + delta)` it is
/// `a_n = (19 + 15 delta)/16 + a_{n-1}/4 + 5 a_{n-2}/8 + a_{n-3}/8`.
pub fn grid_recurrence(model: &WeightModel) -> Result<RecurrenceSpec> {
    let (v1, v2) = two_level_uniform(model)?;
    RecurrenceSpec::new((4.0 * v1 + 15.0 * v2) / 16.0, vec![(1, 0.25), (2, 0.625), (3, 0.125)])
}

/// Line sequence used for leftover segments: `a_1 = 0`, `a_2 = E[w]`, then
/// the two-level line recurrence.
fn segment_sequence(v1: f64, v2: f64, len: usize) -> Vec<f64> {
    let spec = RecurrenceSpec {
        constant_term: (v1 + 3.0 * v2) / 4.0,
        lag_coefficients: vec![(2, 0.75), (3, 0.25)],
        slope: 0.0,
    };
    spec.iterate(&[0.0, 0.0, (v1 + v2) / 2.0], len)
}

pub const SEGMENT_TERMS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SegmentSum {
    /// Sum over segment lengths `2 ..= 100`.
    pub value: f64,
    /// Analytic bound on the dropped terms `t > 100`.
    pub tail_bound: f64,
}

/// `sum_{t=2}^{100} (1 - p_M)^t p_M^2 a_t`: leftover second-row segments of
/// the grid, per second-row node.
pub fn grid_step3_sum(model: &WeightModel, p_m: f64) -> Result<SegmentSum> {
    let (v1, v2) = two_level_uniform(model)?;
    if !(p_m > 0.0 && p_m < 1.0) {
        return Err(Error::InvalidParameter(format!("p_M must be in (0, 1), got {p_m}")));
    }
    let a = segment_sequence(v1, v2, SEGMENT_TERMS + 1);
    let q = 1.0 - p_m;
    let value = (2..=SEGMENT_TERMS).map(|t| q.powi(t as i32) * p_m * p_m * a[t]).sum();
    Ok(SegmentSum {
        value,
        tail_bound: p_m * p_m * v2 / 2.0 * geometric_moment_tail(q, SEGMENT_TERMS + 1),
    })
}

/// `sum_{t >= m} t q^t`.
fn geometric_moment_tail(q: f64, m: usize) -> f64 {
    let mf = m as f64;
    q.powi(m as i32) * (mf - (mf - 1.0) * q) / ((1.0 - q) * (1.0 - q))
}

/// Second-row match probability in the grid decomposition.
pub const GRID_P_M: f64 = 4.0 / 15.0;

/// Grid ratio bound: strip slope plus step-3 segments, over the expected
/// neighbour-max bound per node `(v_1 + 15 v_2)/32`.
pub fn pr_lower_bound_grid(model: &WeightModel) -> Result<f64> {
    let (v1, v2) = two_level_uniform(model)?;
    let strip = grid_recurrence(model)?.slope;
    let step3 = grid_step3_sum(model, GRID_P_M)?.value;
    Ok((strip + step3) * 16.0 / (v1 + 15.0 * v2))
}

/// `sum_{t=2}^{100} a_t / 2^{t+2}`: leftover quantity-2 segments on a
/// multi-unit line, per node.
pub fn multiunit_segment_sum(model: &WeightModel) -> Result<SegmentSum> {
    let (v1, v2) = two_level_uniform(model)?;
    let a = segment_sequence(v1, v2, SEGMENT_TERMS + 1);
    let value = (2..=SEGMENT_TERMS).map(|t| a[t] / 2f64.powi(t as i32 + 2)).sum();
    Ok(SegmentSum {
        value,
        tail_bound: v2 / 8.0 * geometric_moment_tail(0.5, SEGMENT_TERMS + 1),
    })
}

/// Expected multi-unit bound per node with weights uniform on `{v_1, v_2}`
/// and quantities uniform on `{1, 2}` on a line.
pub fn multiunit_bound_per_node(model: &WeightModel) -> Result<f64> {
    let (v1, v2) = two_level_uniform(model)?;
    Ok((v1 + v2) / 4.0 + v2 / 4.0)
}

/// Multi-unit line ratio bound: line slope plus quantity-2 segments, over
/// the expected multi-unit bound.
pub fn pr_lower_bound_multiunit(model: &WeightModel) -> Result<f64> {
    let slope = linear_recurrence(model)?.slope;
    let segments = multiunit_segment_sum(model)?.value;
    Ok((slope + segments) / multiunit_bound_per_node(model)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::generate_line;
    use crate::greedy::greedy_match;

    fn model(values: &[f64]) -> WeightModel {
        WeightModel::uniform(values.to_vec()).unwrap()
    }

    #[test]
    fn two_level_coefficients() {
        let r = linear_recurrence(&model(&[1.0, 2.0])).unwrap();
        assert!((r.constant_term - 1.75).abs() < 1e-15);
        assert_eq!(r.lag_coefficients, vec![(2, 0.75), (3, 0.25)]);
        assert!((r.slope - 7.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn uniform_form_agrees_with_two_level_form() {
        // route through the general-K branch by building the K = 2 terms by hand
        let k = 2usize;
        let betas: Vec<f64> = (1..=k)
            .map(|j| (1.0f64).powi((k - j) as i32) * 3f64.powi(j as i32 - 1) / 4.0)
            .collect();
        assert_eq!(betas, vec![0.25, 0.75]);
        let gammas: Vec<f64> = (1..=k)
            .map(|j| (j..=k).map(|i| i as f64 * binomial(i - 1, j - 1)).sum::<f64>() / 2f64.powi(j as i32 + 1))
            .collect();
        assert_eq!(gammas, vec![0.75, 0.25]);
    }

    #[test]
    fn non_uniform_three_levels_unsupported() {
        let m = WeightModel::new(vec![1.0, 2.0, 3.0], vec![0.2, 0.3, 0.5]).unwrap();
        assert!(matches!(linear_recurrence(&m), Err(Error::Unsupported(_))));
        let k2 = WeightModel::new(vec![1.0, 2.0], vec![0.3, 0.7]).unwrap();
        assert!(linear_recurrence(&k2).is_ok());
    }

    #[test]
    fn initial_terms_follow_the_recurrence() {
        // from n = K + 1 on, the recurrence reproduces exact enumeration
        for m in [
            model(&[1.0, 2.0]),
            WeightModel::new(vec![1.0, 3.0], vec![0.3, 0.7]).unwrap(),
            model(&[1.0, 1.5, 4.0]),
            model(&[1.0, 2.0, 3.0, 5.0]),
        ] {
            let spec = linear_recurrence(&m).unwrap();
            let exact: Vec<f64> = (0..=8).map(|n| expected_greedy_line_exact(&m, n, TieRule::Left).unwrap()).collect();
            let iterated = spec.iterate(&exact[..=m.k()], 9);
            for (a, b) in exact.iter().zip(&iterated) {
                assert!((a - b).abs() < 1e-12, "{exact:?} vs {iterated:?}");
            }
            // both tie rules have the same expectation on lines
            let id = expected_greedy_line_exact(&m, 7, TieRule::Id).unwrap();
            assert!((id - exact[7]).abs() < 1e-12);
        }
    }

    #[test]
    fn direct_iteration_converges_to_slope() {
        let m = model(&[1.0, 2.0]);
        let spec = linear_recurrence(&m).unwrap();
        let a = spec.iterate(&[0.0, 0.0, 1.5], 10_001);
        assert!((a[10_000] / 10_000.0 - spec.slope).abs() < 1e-3);
    }

    #[test]
    fn slope_matches_simulation() {
        let m = model(&[1.0, 2.0, 4.0]);
        let spec = linear_recurrence(&m).unwrap();
        let n = 100_000;
        let mean: f64 = (0..10).map(|s| greedy_match(&generate_line(n, &m, s).unwrap()).total_weight).sum::<f64>() / 10.0;
        assert!(((mean / n as f64) - spec.slope).abs() / spec.slope < 0.005);
    }

    #[test]
    fn linear_ratio_examples() {
        let r = pr_lower_bound_linear(&model(&[1.0, 2.0])).unwrap();
        assert!((r - 14.0 / 15.0).abs() < 1e-12);
        let r = pr_lower_bound_linear(&model(&[1.0, 1.0 + 1e-9])).unwrap();
        assert!((r - 8.0 / 9.0).abs() < 1e-8);
        // the two-level closed form, term for term
        let (p1, p2, v1, v2) = (0.3f64, 0.7f64, 1.0f64, 2.5f64);
        let m = WeightModel::new(vec![v1, v2], vec![p1, p2]).unwrap();
        let closed_form = (p1 * p1 * v1 + (p2 + p1 * p2) * v2)
            / ((2.0 * p2 + 2.0 * p1 * p1 + 3.0 * p1 * p2) * (v1 / 2.0 + (v2 - v1) * (1.0 - p1) / (2.0 - p1)));
        assert!((pr_lower_bound_linear(&m).unwrap() - closed_form).abs() < 1e-14);
    }

    #[test]
    fn uniform_ratio_two_routes() {
        for k in 1..=6 {
            let values: Vec<f64> = (0..k).map(|i| 1.0 + 0.37 * i as f64 + 0.01 * (i * i) as f64).collect();
            let m = model(&values);
            let via_recurrence = pr_lower_bound_linear(&m).unwrap();
            assert!((via_recurrence - uniform_pr_ratio(&values)).abs() < 1e-12, "K = {k}");
            assert!((uniform_pr_ratio(&vec![1.0; k]) - pr_linear_limit(k)).abs() < 1e-14);
        }
        assert!((pr_linear_limit(2) - 8.0 / 9.0).abs() < 1e-15);
        let e2 = 1.0 - (-2.0f64).exp();
        assert!((pr_linear_limit(100_000) - e2).abs() < 1e-4);
    }

    #[test]
    fn grid_constants() {
        let m0 = model(&[1.0, 1.0 + 1e-12]);
        let r = grid_recurrence(&m0).unwrap();
        assert!((r.slope - 19.0 / 30.0).abs() < 1e-9);
        let s = grid_step3_sum(&m0, GRID_P_M).unwrap();
        assert!((s.value - 0.288).abs() < 5e-4, "{}", s.value);
        assert!(s.tail_bound < 1e-6);
        let m1 = model(&[1.0, 2.0]);
        let s1 = grid_step3_sum(&m1, GRID_P_M).unwrap();
        assert!((s1.value - s.value - 0.1967).abs() < 5e-4);
        assert!((pr_lower_bound_grid(&m0).unwrap() - 0.9213).abs() < 1e-4);
        let big = model(&[1.0, 1.0 + 1e7]);
        assert!((pr_lower_bound_grid(&big).unwrap() - 0.6967 / 0.9375).abs() < 1e-3);
        for delta in [0.1, 1.0, 3.0] {
            let fitted = (0.9213 + 0.6967 * delta) / (1.0 + 0.9375 * delta);
            assert!((pr_lower_bound_grid(&model(&[1.0, 1.0 + delta])).unwrap() - fitted).abs() < 2e-4);
        }
        assert!(grid_recurrence(&model(&[1.0, 2.0, 3.0])).is_err());
    }

    #[test]
    fn multiunit_constants() {
        let m0 = model(&[1.0, 1.0 + 1e-12]);
        assert!((multiunit_segment_sum(&m0).unwrap().value - 0.16).abs() < 1e-9);
        assert!((pr_lower_bound_multiunit(&m0).unwrap() - 0.604 / 0.75).abs() < 1e-3);
        let huge = model(&[1.0, 1.0 + 1e9]);
        assert!((pr_lower_bound_multiunit(&huge).unwrap() - 0.866).abs() < 1e-3);
        let mut prev = 0.0;
        for delta in [0.001, 0.01, 0.1, 1.0, 10.0, 100.0] {
            let m = model(&[1.0, 1.0 + delta]);
            let r = pr_lower_bound_multiunit(&m).unwrap();
            let fitted = (0.604 + 0.433 * delta) / (0.75 + 0.5 * delta);
            assert!((r - fitted).abs() < 1e-3);
            assert!(r > prev);
            prev = r;
        }
    }
}
