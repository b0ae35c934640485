use serde::Serialize;

use super::path::EvolutionPath;
use crate::error::{Error, Result};
use crate::field::VectorField;
use crate::multipliers::leray_project;
use crate::norms::{besov, critical_s};
use crate::perturbed::{apply_a, nonlinear_term, Background};
use crate::stats::{loglog_fit, LineFit};

/// `‖∂_t w + A w + P∇·(w⊗w) − Pf‖_{Ḃ^{s(p)−2}_{p,∞}}` at the sample `t`, with
/// `∂_t w` from the three-point (nonuniform) centered difference. With
/// `nonlinear = false` the convective term is left out.
pub fn residual_differential(
    path: &EvolutionPath,
    f: Option<&VectorField>,
    bg: &Background,
    t: f64,
    nonlinear: bool,
    p: f64,
) -> Result<f64> {
    let i = path.index_of(t).ok_or(Error::TimeOutOfRange(t))?;
    if i == 0 || i + 1 >= path.len() {
        return Err(Error::TimeOutOfRange(t));
    }
    let (t0, t1, t2) = (path.times[i - 1], path.times[i], path.times[i + 1]);
    let (h1, h2) = (t1 - t0, t2 - t1);
    let w = &path.states[i];
    let mut r = path.states[i - 1].scale(-h2 / (h1 * (h1 + h2)));
    r.axpy(((h2 - h1) / (h1 * h2)).into(), w);
    r.axpy((h1 / (h2 * (h1 + h2))).into(), &path.states[i + 1]);
    r = &r + &apply_a(w, bg)?;
    if nonlinear {
        r = &r + &nonlinear_term(w)?;
    }
    if let Some(f) = f {
        r = &r - &leray_project(f);
    }
    Ok(besov(&r, critical_s(w.dim(), p) - 2.0, p, f64::INFINITY))
}

#[derive(Clone, Debug, Serialize)]
pub struct ContinuityFit {
    pub times: Vec<f64>,
    pub norms: Vec<f64>,
    pub fit: LineFit,
    pub predicted: f64,
    pub pass: bool,
}

/// Log-log slope of `‖u(t) − a‖_{Ḃ^{s(p)−α}_{p,∞}}` over the smallest sampled
/// decade `[t_1, 10 t_1]`; passes when it is at least `α/2 − 0.1`.
pub fn check_initial_continuity(path: &EvolutionPath, a: &VectorField, alpha: f64, p: f64) -> Result<ContinuityFit> {
    if !(0.0..=2.0).contains(&alpha) {
        return Err(Error::ExponentOutOfRange(format!("alpha must lie in [0, 2], got {alpha}")));
    }
    let t1 = path.times.iter().copied().find(|&t| t > 0.0).ok_or(Error::InsufficientSamples { needed: 4, got: 0 })?;
    let sigma = critical_s(a.dim(), p) - alpha;
    let (times, norms): (Vec<f64>, Vec<f64>) = path
        .times
        .iter()
        .zip(&path.states)
        .filter(|(&t, _)| t > 0.0 && t <= 10.0 * t1 * (1.0 + 1e-12))
        .map(|(&t, u)| (t, besov(&(u - a), sigma, p, f64::INFINITY)))
        .unzip();
    if times.len() < 4 {
        return Err(Error::InsufficientSamples { needed: 4, got: times.len() });
    }
    let fit = loglog_fit(&times, &norms)?;
    let predicted = alpha / 2.0;
    Ok(ContinuityFit { pass: fit.slope >= predicted - 0.1, times, norms, fit, predicted })
}
