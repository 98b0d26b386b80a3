//! Steady-state participant count for the interval-based dynamic model.

use crate::error::{Error, Result};

/// Fixed point of `M = M gamma e^{-mu T} + sum_{t=0}^{T-1} lambda e^{-mu (T - t)}`.
pub fn steady_state_participants(lambda: f64, mu: f64, gamma: f64, interval: u32) -> Result<f64> {
    if !(lambda >= 0.0 && lambda.is_finite()) || !(mu >= 0.0 && mu.is_finite()) || !(0.0..=1.0).contains(&gamma) {
        return Err(Error::InvalidParameter(format!(
            "need lambda >= 0, mu >= 0, gamma in [0, 1]; got {lambda}, {mu}, {gamma}"
        )));
    }
    if interval == 0 {
        return Err(Error::InvalidParameter("interval must be >= 1".into()));
    }
    let t = interval as f64;
    let retained = gamma * (-mu * t).exp();
    if retained >= 1.0 {
        return Err(Error::NoSteadyState(retained));
    }
    let inflow: f64 = (0..interval).map(|s| lambda * (-mu * (t - s as f64)).exp()).sum();
    Ok(inflow / (1.0 - retained))
}
