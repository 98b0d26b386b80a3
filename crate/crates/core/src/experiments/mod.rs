//! Seeded Monte Carlo experiments with statistical reporting.
//!
//! Every sample draws from its own stream derived from the master seed and
//! the sample index, and aggregation happens in index order, so a config and
//! seed determine the report byte for byte.

mod config;
mod figures;
mod pr;
mod probe;
mod report;
mod rounds;
mod sweeps;

pub use config::{
    hash_json, Baseline, CachingStudy, ExperimentConfig, FailureSweep, GnpCurve, GraphConfig, IntervalSweep, Metric, QuantityModel,
};
pub use figures::{figure_config, FIGURES};
pub use pr::{analytic_lower_bound, baseline_value, collect_samples, delta_sweep, pr_estimate, sample_graph, with_two_level};
pub use probe::{probe_strip, strip_graph, StripProbe};
pub use report::{CurvePoint, ExperimentReport, Metadata, PrEstimate, RoundsAtSize, RoundsReport, SampleRecord};
pub use rounds::{measure_rounds, resize, DEFAULT_SIZES};
pub use sweeps::{
    interval_series_name, run_caching_case_study, run_failure_sweep, run_interval_sweep, SYNTHETIC_FLOORS,
};

use crate::analytics::pr_curve_gnp;
use crate::error::Result;
use crate::stats::Summary;

/// Normal-approximation intervals are flagged below this many samples.
pub const MIN_CI_SAMPLES: usize = 30;

fn metadata(config: &ExperimentConfig) -> Metadata {
    Metadata {
        config_hash: config.hash(),
        seed: config.seed,
        code_version: env!("CARGO_PKG_VERSION").to_string(),
        timestamp: config.timestamp.then(|| {
            std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map_or(0, |d| d.as_secs())
        }),
    }
}

fn new_report(config: &ExperimentConfig) -> ExperimentReport {
    let mut report = ExperimentReport::new(config.name.clone(), metadata(config));
    if config.samples < MIN_CI_SAMPLES {
        report.warnings.push(format!(
            "{} samples per point; normal-approximation intervals assume at least {MIN_CI_SAMPLES}",
            config.samples
        ));
    }
    report
}

fn add_sample_metrics(report: &mut ExperimentReport, records: &[SampleRecord]) {
    let col = |f: &dyn Fn(&SampleRecord) -> f64| records.iter().map(f).collect::<Vec<f64>>();
    report.metrics.insert("greedy_total".into(), Summary::of(&col(&|r| r.greedy)));
    report
        .metrics
        .insert("greedy_per_user".into(), Summary::of(&col(&|r| r.greedy / r.nodes as f64)));
    report.metrics.insert("rounds".into(), Summary::of(&col(&|r| r.rounds as f64)));
    if records.iter().all(|r| r.baseline.is_some()) && !records.is_empty() {
        report
            .metrics
            .insert("baseline_total".into(), Summary::of(&col(&|r| r.baseline.unwrap_or(f64::NAN))));
    }
}

/// Paired greedy/baseline sampling; with a `delta_grid` the ratio is traced
/// across two-level weights instead.
pub fn estimate_pr(config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    let mut report = new_report(config);
    let graph = config
        .graph
        .as_ref()
        .ok_or_else(|| crate::Error::Config("missing [graph] section".into()))?;
    if config.delta_grid.is_some() {
        report.curves = delta_sweep(config, graph)?;
        return Ok(report);
    }
    let records = collect_samples(config, graph, config.seed)?;
    add_sample_metrics(&mut report, &records);
    if config.baseline.is_some() {
        report.pr = Some(pr_estimate(config, graph, &records)?);
    }
    if config.keep_records {
        report.records = Some(records);
    }
    Ok(report)
}

/// Runs every requested metric and merges the results into one report.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    let mut report = new_report(config);
    let mut sampled = false;
    for &metric in &config.metrics {
        match metric {
            Metric::PrVsBound | Metric::PrVsExact | Metric::PerUserWeight => {
                if sampled {
                    continue;
                }
                sampled = true;
                let part = estimate_pr(config)?;
                report.metrics.extend(part.metrics);
                report.pr = part.pr;
                report.curves.extend(part.curves);
                report.records = part.records;
            }
            Metric::Rounds => report.rounds = Some(measure_rounds(config)?),
            Metric::CachingCurve => {
                let study = config.caching.as_ref().expect("validated");
                report.curves.extend(run_caching_case_study(study, config.samples, config.seed)?);
            }
            Metric::FailureCurve => {
                let sweep = config.failure.as_ref().expect("validated");
                report.curves.extend(run_failure_sweep(sweep, config.samples, config.seed)?);
            }
            Metric::DynamicCurve => {
                let sweep = config.dynamic.as_ref().expect("validated");
                report.curves.extend(run_interval_sweep(sweep, config.samples, config.seed)?);
            }
            Metric::GnpCurve => {
                let spec = config.gnp_curve.as_ref().expect("validated");
                for p in pr_curve_gnp(&spec.degrees, spec.n, &spec.weights, config.samples.max(2), config.seed)? {
                    report.curves.push(CurvePoint {
                        series: "pr".into(),
                        parameter: p.d,
                        analytic_value: Some(p.analytic_pr),
                        simulated_value: p.simulated_pr,
                        ci_halfwidth: p.ci_halfwidth,
                    });
                    report.curves.push(CurvePoint {
                        series: "per_user".into(),
                        parameter: p.d,
                        analytic_value: Some(p.tree_per_node),
                        simulated_value: p.greedy_per_node,
                        ci_halfwidth: p.greedy_per_node_ci,
                    });
                }
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests;
