use serde::Serialize;

use crate::error::{Error, Result};
use crate::stats::loglog_fit;

/// Absolute slope tolerance of a decay fit.
pub const SLOPE_TOL: f64 = 0.15;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecayFit {
    pub window: (f64, f64),
    pub samples: Vec<(f64, f64)>,
    pub slope: f64,
    pub r2: f64,
    pub predicted: f64,
    /// `|slope − predicted| <= 0.15`.
    pub pass: bool,
}

impl DecayFit {
    /// One-sided check `slope <= predicted + 0.15`: decay at least as fast as predicted.
    pub fn decays_at_least(&self) -> bool {
        self.slope <= self.predicted + SLOPE_TOL
    }
}

/// Least squares of `log norm` on `log t` over samples with `t` in `window`.
pub fn fit_decay(samples: &[(f64, f64)], window: (f64, f64), predicted: f64) -> Result<DecayFit> {
    let eps = 1e-12 * window.1.abs().max(1.0);
    let inside: Vec<(f64, f64)> = samples
        .iter()
        .copied()
        .filter(|&(t, _)| t >= window.0 - eps && t <= window.1 + eps)
        .collect();
    if inside.len() < 6 {
        return Err(Error::InsufficientSamples { needed: 6, got: inside.len() });
    }
    let (t, v): (Vec<f64>, Vec<f64>) = inside.iter().copied().unzip();
    let line = loglog_fit(&t, &v)?;
    Ok(DecayFit {
        window,
        samples: inside,
        slope: line.slope,
        r2: line.r2.clamp(0.0, 1.0),
        predicted,
        pass: (line.slope - predicted).abs() <= SLOPE_TOL,
    })
}
