use serde::Serialize;

use super::background::Background;
use super::duhamel::{duhamel, ConstantSource, DuhamelConfig};
use super::operator::{apply_a, apply_b};
use super::timestep::Propagator;
use crate::error::{Error, Result};
use crate::field::VectorField;
use crate::grid::Grid;
use crate::norms::besov;
use crate::stats::{loglog_fit, LineFit};

/// Upper end of the box-validity window, `0.1 (L/2π)²`.
pub fn box_window_max(grid: &Grid) -> f64 {
    0.1 * (grid.length() / (2.0 * std::f64::consts::PI)).powi(2)
}

pub(crate) fn check_window(grid: &Grid, times: &[f64]) -> Result<()> {
    let hi = box_window_max(grid);
    if let Some(&t) = times.iter().find(|&&t| !(t > 0.0) || t > hi * (1.0 + 1e-12)) {
        return Err(Error::WindowViolation(format!("t = {t} outside (0, {hi}]")));
    }
    Ok(())
}

/// Per-time ratios of the three smoothing estimates for one initial field.
#[derive(Clone, Debug, Serialize)]
pub struct SmoothingTrace {
    pub times: Vec<f64>,
    /// `‖e^{−tA}f‖_{Ḃ^s_{p,∞}} / ((1+‖U‖)‖f‖_{Ḃ^s_{p,∞}})`.
    pub ratio_i: Vec<f64>,
    /// `t^{τ/2} ‖e^{−tA}f‖_{Ḃ^{s+τ}_{p,1}} / ((1+‖U‖)‖f‖_{Ḃ^s_{p,∞}})`.
    pub ratio_ii: Vec<f64>,
    /// `‖e^{−tA}f − f‖_{Ḃ^{s−τ}_{p,∞}} / (t^{τ/2}‖f‖_{Ḃ^s_{p,∞}})`.
    pub ratio_iii: Vec<f64>,
    /// `‖e^{−tA}f‖_{Ḃ^{s+τ}_{p,1}}`, the quantity whose slope is `−τ/2`.
    pub high_norm: Vec<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SmoothingReport {
    pub traces: Vec<SmoothingTrace>,
    pub max_i: f64,
    pub max_ii: f64,
    pub max_iii: f64,
}

/// Evaluates `e^{−tA} f` on an increasing time grid, chaining the semigroup.
pub fn propagate_path(prop: &dyn Propagator, f: &VectorField, times: &[f64]) -> Result<Vec<VectorField>> {
    let mut out = Vec::with_capacity(times.len());
    let mut cur = f.clone();
    let mut t_prev = 0.0;
    for &t in times {
        if t < t_prev {
            return Err(Error::InvalidArgument("times must be increasing".into()));
        }
        cur = prop.propagate(&cur, t - t_prev)?;
        t_prev = t;
        out.push(cur.clone());
    }
    Ok(out)
}

/// Smoothing estimates (i)–(iii) on the window `times` for each ensemble member.
pub fn verify_smoothing(
    prop: &dyn Propagator,
    ensemble: &[VectorField],
    s: f64,
    tau: f64,
    p: f64,
    times: &[f64],
) -> Result<SmoothingReport> {
    if !(-2.0 < s && s < 1.0) || !(tau > 0.0 && tau < 1.0 - s) || tau > 2.0 + s {
        return Err(Error::ExponentOutOfRange(format!("need -2 < s < 1, 0 < tau < 1 - s, tau <= 2 + s; got s = {s}, tau = {tau}")));
    }
    let grid = prop.background().grid().clone();
    check_window(&grid, times)?;
    let u_norm = prop.background().weak_ln_norm();
    let mut traces = Vec::with_capacity(ensemble.len());
    for f in ensemble {
        let base = besov(f, s, p, f64::INFINITY);
        if base == 0.0 {
            continue;
        }
        let states = propagate_path(prop, f, times)?;
        let mut tr = SmoothingTrace {
            times: times.to_vec(),
            ratio_i: vec![],
            ratio_ii: vec![],
            ratio_iii: vec![],
            high_norm: vec![],
        };
        for (&t, v) in times.iter().zip(&states) {
            let high = besov(v, s + tau, p, 1.0);
            tr.high_norm.push(high);
            tr.ratio_i.push(besov(v, s, p, f64::INFINITY) / ((1.0 + u_norm) * base));
            tr.ratio_ii.push(t.powf(tau / 2.0) * high / ((1.0 + u_norm) * base));
            tr.ratio_iii.push(besov(&(v - f), s - tau, p, f64::INFINITY) / (t.powf(tau / 2.0) * base));
        }
        traces.push(tr);
    }
    let max = |sel: fn(&SmoothingTrace) -> &Vec<f64>| {
        traces.iter().flat_map(|t| sel(t).iter().copied()).fold(0.0, f64::max)
    };
    Ok(SmoothingReport {
        max_i: max(|t| &t.ratio_i),
        max_ii: max(|t| &t.ratio_ii),
        max_iii: max(|t| &t.ratio_iii),
        traces,
    })
}

/// `‖(e^{−tA}f − f)/t + A f‖_{Ḃ^{σ}_{p,∞}}`.
pub fn generator_residual(prop: &dyn Propagator, f: &VectorField, t: f64, sigma: f64, p: f64) -> Result<f64> {
    let et = prop.propagate(f, t)?;
    let mut r = (&et - f).scale(1.0 / t);
    r = &r + &apply_a(f, prop.background())?;
    Ok(besov(&r, sigma, p, f64::INFINITY))
}

#[derive(Clone, Debug, Serialize)]
pub struct GeneratorFit {
    pub times: Vec<f64>,
    pub residuals: Vec<f64>,
    pub fit: LineFit,
    pub predicted: f64,
    pub pass: bool,
}

/// Residual of the generator limit in `Ḃ^{s−2−τ}_{p,∞}` and its log-log slope,
/// which should be at least `τ/2 − 0.1`.
pub fn verify_generator(
    prop: &dyn Propagator,
    f: &VectorField,
    times: &[f64],
    s: f64,
    tau: f64,
    p: f64,
) -> Result<GeneratorFit> {
    if !(0.0 < s && s < 1.0) || !(0.0..=2.0).contains(&tau) || !(tau < s) {
        return Err(Error::ExponentOutOfRange(format!("need 0 < s < 1, 0 <= tau <= 2, tau < s; got s = {s}, tau = {tau}")));
    }
    let residuals = times
        .iter()
        .map(|&t| generator_residual(prop, f, t, s - 2.0 - tau, p))
        .collect::<Result<Vec<_>>>()?;
    let fit = loglog_fit(times, &residuals)?;
    let predicted = tau / 2.0;
    Ok(GeneratorFit { times: times.to_vec(), residuals, pass: fit.slope >= predicted - 0.1, fit, predicted })
}

/// One point of the critical-estimate sweep for a constant source `g`.
#[derive(Clone, Debug, Serialize)]
pub struct CriticalPoint {
    pub t: f64,
    /// `‖∫_0^t e^{−(t−σ)A} g dσ‖_{Ḃ^s_{p,∞}}`.
    pub lhs: f64,
    /// `‖g‖_{Ḃ^{s−2}_{p,∞}}`.
    pub rhs: f64,
    pub ratio: f64,
    /// `‖A ∫_0^t e^{−(t−σ)A} g dσ‖_{Ḃ^{s−2}_{p,∞}} / ‖g‖_{Ḃ^{s−2}_{p,∞}}`.
    pub maximal_regularity: f64,
}

pub fn critical_sweep(
    prop: &dyn Propagator,
    g: &VectorField,
    times: &[f64],
    s: f64,
    p: f64,
    cfg: &DuhamelConfig,
) -> Result<Vec<CriticalPoint>> {
    let rhs = besov(g, s - 2.0, p, f64::INFINITY);
    if rhs == 0.0 {
        return Err(Error::InvalidArgument("source must be nonzero".into()));
    }
    let src = ConstantSource(g.clone());
    times
        .iter()
        .map(|&t| {
            let (d, _) = duhamel(&src, 0.0, t, prop, cfg)?;
            let lhs = besov(&d, s, p, f64::INFINITY);
            let ad = apply_a(&d, prop.background())?;
            let mr = besov(&ad, s - 2.0, p, f64::INFINITY) / rhs;
            Ok(CriticalPoint { t, lhs, rhs, ratio: lhs / rhs, maximal_regularity: mr })
        })
        .collect()
}

/// `‖B[w]‖_{Ḃ^{s−2}_{p,∞}} / (‖U‖_{L^{n,∞}} ‖w‖_{Ḃ^s_{p,∞}})`; NaN for degenerate inputs.
pub fn ab_ratio(w: &VectorField, bg: &Background, s: f64, p: f64) -> Result<f64> {
    let den = bg.weak_ln_norm() * besov(w, s, p, f64::INFINITY);
    if den == 0.0 {
        return Ok(f64::NAN);
    }
    Ok(besov(&apply_b(w, bg)?, s - 2.0, p, f64::INFINITY) / den)
}
