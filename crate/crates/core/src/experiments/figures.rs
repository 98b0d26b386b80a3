//! Bundled configurations for the figure reproductions.

use super::config::{
    Baseline, CachingStudy, ExperimentConfig, FailureSweep, GnpCurve, GraphConfig, IntervalSweep, Metric, QuantityModel,
};
use crate::error::{Error, Result};
use crate::graph::{caching_weight_model, Family};
use crate::weights::WeightModel;

pub const FIGURES: [&str; 5] = ["fig7", "fig8", "fig9", "fig10", "fig11"];

fn base(name: &str, seed: u64, samples: usize, metric: Metric) -> ExperimentConfig {
    ExperimentConfig {
        name: Some(name.to_string()),
        seed,
        samples,
        metrics: vec![metric],
        baseline: None,
        graph: None,
        quantities: None,
        tie_rule: Default::default(),
        delta_grid: None,
        sizes: None,
        caching: None,
        failure: None,
        dynamic: None,
        gnp_curve: None,
        keep_records: false,
        timestamp: false,
    }
}

/// The bundled configuration for `name`, one of [`FIGURES`].
pub fn figure_config(name: &str) -> Result<ExperimentConfig> {
    let two_level = WeightModel::two_level(1.0)?;
    let config = match name {
        "fig7" => ExperimentConfig {
            caching: Some(CachingStudy {
                locations: None,
                users: 300,
                ranges: (0..=12).map(f64::from).collect(),
                library_size: 10,
                cache_size: 3,
            }),
            ..base(name, 7, 30, Metric::CachingCurve)
        },
        "fig8" => ExperimentConfig {
            gnp_curve: Some(GnpCurve {
                n: 10_000,
                degrees: (1..=10)
                    .map(|i| i as f64 / 10.0)
                    .chain((3..=20).map(|i| i as f64 / 2.0))
                    .collect(),
                weights: two_level,
            }),
            ..base(name, 8, 30, Metric::GnpCurve)
        },
        "fig9" => ExperimentConfig {
            failure: Some(FailureSweep {
                n: 10_000,
                radius: 1000.0,
                ranges: (1..=10).map(|i| 10.0 * i as f64).collect(),
                delta1: 0.02,
                delta2: 0.1,
                interference_radius: None,
                library_size: 10,
                cache_size: 3,
            }),
            ..base(name, 9, 10, Metric::FailureCurve)
        },
        "fig10" => ExperimentConfig {
            dynamic: Some(IntervalSweep {
                lambda: 20.0,
                mus: vec![0.05, 0.1, 0.2],
                gammas: vec![0.2, 0.5],
                intervals: (1..=20).collect(),
                range: 100.0,
                radius: 1000.0,
                minutes: 2000,
                weights: caching_weight_model(10, 3)?,
            }),
            ..base(name, 10, 10, Metric::DynamicCurve)
        },
        "fig11" => ExperimentConfig {
            graph: Some(GraphConfig {
                family: Family::Line { n: 100_000 },
                weights: two_level.into(),
            }),
            baseline: Some(Baseline::MultiunitBound),
            quantities: Some(QuantityModel::uniform(vec![1, 2])),
            delta_grid: Some(vec![0.01, 0.1, 0.25, 0.5, 1.0, 2.0, 5.0, 10.0]),
            ..base(name, 11, 20, Metric::PrVsBound)
        },
        other => {
            return Err(Error::Config(format!(
                "unknown figure {other:?} (expected one of {})",
                FIGURES.join(", ")
            )))
        }
    };
    config.validate()?;
    Ok(config)
}
