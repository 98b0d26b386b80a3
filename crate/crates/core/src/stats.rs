//! Sample summaries and ratio estimators with normal-approximation intervals.

use serde::{Deserialize, Serialize};

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub count: usize,
    pub mean: f64,
    pub std_error: f64,
    /// 95% half-width; NaN with fewer than two samples.
    pub ci_halfwidth: f64,
    pub min: f64,
    pub max: f64,
}

impl Summary {
    pub fn of(xs: &[f64]) -> Summary {
        let count = xs.len();
        if count == 0 {
            return Summary {
                count,
                mean: f64::NAN,
                std_error: f64::NAN,
                ci_halfwidth: f64::NAN,
                min: f64::NAN,
                max: f64::NAN,
            };
        }
        let mean = xs.iter().sum::<f64>() / count as f64;
        let (min, max) = xs.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)));
        // keep the mean inside [min, max] despite rounding
        let mean = mean.clamp(min, max);
        let std_error = if count >= 2 {
            let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (count - 1) as f64;
            (var / count as f64).sqrt()
        } else {
            f64::NAN
        };
        Summary {
            count,
            mean,
            std_error,
            ci_halfwidth: Z95 * std_error,
            min,
            max,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatioEstimate {
    pub ratio: f64,
    pub ci_halfwidth: f64,
}

/// `mean(x) / mean(y)` with a delta-method interval.
pub fn ratio_of_means(xs: &[f64], ys: &[f64]) -> RatioEstimate {
    assert_eq!(xs.len(), ys.len(), "paired samples");
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let ratio = mx / my;
    if xs.len() < 2 {
        return RatioEstimate { ratio, ci_halfwidth: f64::NAN };
    }
    // residuals x - r y have mean zero; their spread drives the interval
    let var = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (x - ratio * y).powi(2))
        .sum::<f64>()
        / (n - 1.0);
    RatioEstimate {
        ratio,
        ci_halfwidth: Z95 * (var / n).sqrt() / my.abs(),
    }
}

/// Mean of per-sample ratios; samples with a zero denominator are skipped.
pub fn mean_of_ratios(xs: &[f64], ys: &[f64]) -> RatioEstimate {
    let ratios: Vec<f64> = xs.iter().zip(ys).filter(|(_, y)| **y != 0.0).map(|(x, y)| x / y).collect();
    let s = Summary::of(&ratios);
    RatioEstimate {
        ratio: s.mean,
        ci_halfwidth: s.ci_halfwidth,
    }
}

/// Ordinary least squares `y = a + b x`; returns `(a, b, R^2)`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let b = sxy / sxx;
    let a = my - b * mx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    (a, b, r2)
}
