use super::*;
use crate::graph::Family;
use crate::greedy::TieRule;
use crate::weights::WeightModel;

fn line(n: usize, model: WeightModel) -> GraphConfig {
    GraphConfig {
        family: Family::Line { n },
        weights: model.into(),
    }
}

const SAMPLE_TOML: &str = r#"
name = "line-check"
seed = 5
samples = 40
metrics = ["pr_vs_bound"]
baseline = "decomposition"

[graph]
family = "line"
n = 2000
weights = { kind = "model", model = { values = [1.0, 2.0], probs = [0.5, 0.5] } }
"#;

#[test]
fn parses_toml_and_hashes_stably() {
    let c = ExperimentConfig::from_toml(SAMPLE_TOML).unwrap();
    assert_eq!(c.samples, 40);
    assert_eq!(c.baseline, Some(Baseline::Decomposition));
    assert_eq!(c.hash(), ExperimentConfig::from_toml(SAMPLE_TOML).unwrap().hash());
    let mut other = c.clone();
    other.seed = 6;
    assert_ne!(c.hash(), other.hash());
}

#[test]
fn rejects_invalid_configs() {
    let bad = SAMPLE_TOML.replace("samples = 40", "samples = 0");
    assert!(ExperimentConfig::from_toml(&bad).is_err());
    let grid = SAMPLE_TOML
        .replace("family = \"line\"\nn = 2000", "family = \"grid2d\"\nside = 10")
        .replace("\"decomposition\"", "\"path_dp\"");
    let err = ExperimentConfig::from_toml(&grid).unwrap_err().to_string();
    assert!(err.contains("path_dp"), "{err}");
    let mismatch = SAMPLE_TOML.replace("pr_vs_bound", "pr_vs_exact");
    assert!(ExperimentConfig::from_toml(&mismatch).is_err());
    let multi = SAMPLE_TOML.replace("\"decomposition\"", "\"multiunit_bound\"");
    assert!(ExperimentConfig::from_toml(&multi).is_err());
}

#[test]
fn identical_config_gives_identical_report() {
    let mut c = ExperimentConfig::from_toml(SAMPLE_TOML).unwrap();
    c.keep_records = true;
    let a = run_experiment(&c).unwrap();
    let b = run_experiment(&c).unwrap();
    assert_eq!(a.to_json(), b.to_json());
    assert!(a.metadata.timestamp.is_none());
    let records = a.records.as_ref().unwrap();
    assert_eq!(records.len(), 40);
    assert!(records.iter().enumerate().all(|(i, r)| r.index == i));
}

#[test]
fn aggregation_ignores_sample_order() {
    let mut c = ExperimentConfig::from_toml(SAMPLE_TOML).unwrap();
    c.keep_records = true;
    let report = run_experiment(&c).unwrap();
    let greedy: Vec<f64> = report.records.unwrap().iter().map(|r| r.greedy).collect();
    let mut reversed = greedy.clone();
    reversed.reverse();
    let (a, b) = (Summary::of(&greedy), Summary::of(&reversed));
    assert!((a.mean - b.mean).abs() < 1e-12 && (a.std_error - b.std_error).abs() < 1e-12);
}

#[test]
fn summaries_respect_their_invariants() {
    let report = run_experiment(&ExperimentConfig::from_toml(SAMPLE_TOML).unwrap()).unwrap();
    for (name, s) in &report.metrics {
        assert!(s.min <= s.mean && s.mean <= s.max, "{name}");
        assert!(s.ci_halfwidth.is_finite(), "{name}");
    }
    let pr = report.pr.unwrap();
    let bound = pr.analytic_lower_bound.unwrap();
    assert!((bound - 14.0 / 15.0).abs() < 1e-12);
    assert!(pr.ratio_of_means.ratio >= bound - pr.ratio_of_means.ci_halfwidth);
}

#[test]
fn few_samples_warn() {
    let c = ExperimentConfig::new(line(50, WeightModel::two_level(1.0).unwrap()), 5, 1).with_metric(Metric::PerUserWeight);
    let r = run_experiment(&c).unwrap();
    assert_eq!(r.warnings.len(), 1);
    assert!(r.pr.is_none());
}

#[test]
fn three_edge_path_ratio() {
    // decreasing id priority on four users is the lower-id-first rule on 0..3
    let mut c = ExperimentConfig::new(line(4, WeightModel::two_level(1e-6).unwrap()), 20_000, 3)
        .with_metric(Metric::PrVsExact)
        .with_baseline(Baseline::Exhaustive);
    c.tie_rule = TieRule::Left;
    let pr = estimate_pr(&c).unwrap().pr.unwrap();
    let r = pr.ratio_of_means;
    assert!((r.ratio - 0.875).abs() < 2.0 * r.ci_halfwidth + 1e-6, "{r:?}");
}

#[test]
fn exact_baselines_dominate_every_instance() {
    for (baseline, graph) in [
        (Baseline::PathDp, line(12, WeightModel::evenly_spaced(3, 1.0).unwrap())),
        (
            Baseline::Exhaustive,
            GraphConfig {
                family: Family::Gnp { n: 9, p: 0.4 },
                weights: WeightModel::two_level(1.0).unwrap().into(),
            },
        ),
    ] {
        let mut c = ExperimentConfig::new(graph, 200, 9)
            .with_metric(Metric::PrVsExact)
            .with_baseline(baseline);
        c.keep_records = true;
        let report = estimate_pr(&c).unwrap();
        for r in report.records.unwrap() {
            let opt = r.baseline.unwrap();
            assert!(r.greedy <= opt + 1e-9 && 2.0 * r.greedy >= opt - 1e-9);
        }
        assert!(report.pr.unwrap().ratio_of_means.ratio <= 1.0);
    }
}

#[test]
fn two_node_line_takes_one_round() {
    let mut c = ExperimentConfig::new(line(2, WeightModel::two_level(1.0).unwrap()), 3, 0).with_metric(Metric::Rounds);
    c.sizes = Some(vec![2]);
    let r = measure_rounds(&c).unwrap();
    assert_eq!(r.sizes[0].rounds.mean, 1.0);
    assert_eq!(r.sizes[0].rounds.max, 1.0);
}

#[test]
fn gnp_rounds_check_applicability() {
    let graph = GraphConfig {
        family: Family::Gnp { n: 1001, p: 0.0005 },
        weights: WeightModel::two_level(1.0).unwrap().into(),
    };
    let mut c = ExperimentConfig::new(graph, 4, 0).with_metric(Metric::Rounds);
    c.sizes = Some(vec![500, 2000]);
    let r = measure_rounds(&c).unwrap();
    assert_eq!(r.applicability_holds, Some(true));
    assert_eq!(r.sizes[1].nodes, 2000);
}

#[test]
fn multiunit_delta_sweep_carries_the_bound() {
    let mut c = ExperimentConfig::new(line(5000, WeightModel::two_level(1.0).unwrap()), 6, 4)
        .with_metric(Metric::PrVsBound)
        .with_baseline(Baseline::MultiunitBound);
    c.quantities = Some(QuantityModel::uniform(vec![1, 2]));
    c.delta_grid = Some(vec![0.5, 2.0]);
    let r = run_experiment(&c).unwrap();
    let curve = r.series("pr");
    assert_eq!(curve.len(), 2);
    for p in curve {
        let bound = p.analytic_value.unwrap();
        assert!(p.simulated_value >= bound - 0.01, "{p:?}");
    }
}

#[test]
fn csv_has_the_documented_header() {
    let mut r = ExperimentReport::new(None, metadata(&ExperimentConfig::from_toml(SAMPLE_TOML).unwrap()));
    r.curves.push(CurvePoint {
        series: "pr".into(),
        parameter: 0.5,
        analytic_value: None,
        simulated_value: 0.9,
        ci_halfwidth: 0.01,
    });
    let text = r.curves_csv().unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("series,parameter,analytic_value,simulated_value,ci_halfwidth"));
    assert_eq!(lines.next(), Some("pr,0.5,,0.9,0.01"));
}

#[test]
fn caching_study_is_monotone_and_starts_at_zero() {
    let study = CachingStudy {
        locations: None,
        users: 200,
        ranges: vec![0.0, 3.0, 6.0],
        library_size: 10,
        cache_size: 3,
    };
    let curve = run_caching_case_study(&study, 6, 2).unwrap();
    let caching: Vec<f64> = curve.iter().filter(|c| c.series == "caching").map(|c| c.simulated_value).collect();
    assert_eq!(caching[0], 0.0);
    assert!(caching.windows(2).all(|w| w[1] >= w[0]));
}
