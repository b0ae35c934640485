//! Small statistics helpers: ratio summaries and least-squares lines.

use serde::Serialize;

use crate::error::{Error, Result};

/// Max / median / min of a set of finite ratios.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RatioStats {
    pub max: f64,
    pub median: f64,
    pub min: f64,
    pub count: usize,
    pub skipped: usize,
}

impl RatioStats {
    /// Non-finite entries are counted as skipped.
    pub fn from_ratios(ratios: &[f64]) -> Result<Self> {
        let mut v: Vec<f64> = ratios.iter().copied().filter(|r| r.is_finite()).collect();
        if v.is_empty() {
            return Err(Error::InsufficientSamples { needed: 1, got: 0 });
        }
        v.sort_by(f64::total_cmp);
        let n = v.len();
        let median = if n % 2 == 1 { v[n / 2] } else { 0.5 * (v[n / 2 - 1] + v[n / 2]) };
        Ok(RatioStats { max: v[n - 1], median, min: v[0], count: n, skipped: ratios.len() - n })
    }
}

/// `|a − b| / max(|a|, |b|)`.
pub fn relative_drift(a: f64, b: f64) -> f64 {
    let d = a.abs().max(b.abs());
    if d == 0.0 {
        0.0
    } else {
        (a - b).abs() / d
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
}

/// Ordinary least squares `y = slope x + intercept`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> Result<LineFit> {
    let n = x.len();
    if n < 2 || y.len() != n {
        return Err(Error::InsufficientSamples { needed: 2, got: n.min(y.len()) });
    }
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|b| (b - my) * (b - my)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidArgument("abscissae are all equal".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r2 = if syy == 0.0 { 1.0 } else { (sxy * sxy / (sxx * syy)).clamp(0.0, 1.0) };
    Ok(LineFit { slope, intercept, r2 })
}

/// Least-squares slope of `log y` against `log x`.
pub fn loglog_fit(x: &[f64], y: &[f64]) -> Result<LineFit> {
    if x.iter().chain(y).any(|&v| !(v > 0.0)) {
        return Err(Error::NonPositiveNorm);
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    linear_fit(&lx, &ly)
}

/// `t_min · 2^(i/2)` for `i = 0..count`.
pub fn geometric_times(t_min: f64, count: usize) -> Vec<f64> {
    (0..count).map(|i| t_min * (2.0f64).powf(i as f64 / 2.0)).collect()
}

/// Geometric grid from `t_lo` to `t_hi` with `per_decade` points per decade, endpoints included.
pub fn log_grid(t_lo: f64, t_hi: f64, per_decade: usize) -> Vec<f64> {
    let decades = (t_hi / t_lo).log10();
    let m = ((decades * per_decade as f64).round() as usize).max(1);
    (0..=m).map(|i| t_lo * (t_hi / t_lo).powf(i as f64 / m as f64)).collect()
}
