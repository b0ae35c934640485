use log::debug;
use serde::Serialize;

use super::path::EvolutionPath;
use crate::error::{Error, Result};
use crate::field::VectorField;
use crate::norms::{besov, critical_s};
use crate::perturbed::{duhamel, nonlinear_term, propagate_path, DuhamelConfig, Propagator};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PicardConfig {
    pub max_iters: usize,
    /// Relative tolerance on `sup_i ‖w_{m+1}(t_i) − w_m(t_i)‖_{Ḃ^{s(p)}_{p,∞}}`.
    pub tol: f64,
    pub p: f64,
    pub duhamel: DuhamelConfig,
}

impl Default for PicardConfig {
    fn default() -> Self {
        PicardConfig { max_iters: 30, tol: 1e-10, p: 2.0, duhamel: DuhamelConfig::default() }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PicardReport {
    pub iterations: usize,
    pub increments: Vec<f64>,
    /// `sup_i ‖w(t_i) − e^{−t_i A}b + B(w,w)(t_i)‖ / sup_i ‖w(t_i)‖`.
    pub residual: f64,
}

/// Cubic Lagrange interpolation through the (up to) four samples nearest `s`.
fn interpolate(times: &[f64], states: &[VectorField], s: f64) -> VectorField {
    let m = times.len();
    if m == 1 {
        return states[0].clone();
    }
    let k = times.partition_point(|&t| t <= s).clamp(1, m - 1);
    let width = 4.min(m);
    let lo = (k as isize - 2).clamp(0, (m - width) as isize) as usize;
    let idx: Vec<usize> = (lo..lo + width).collect();
    let mut out = VectorField::zeros(states[0].grid());
    for &i in &idx {
        let mut w = 1.0;
        for &j in &idx {
            if j != i {
                w *= (s - times[j]) / (times[i] - times[j]);
            }
        }
        out.axpy(w.into(), &states[i]);
    }
    out
}

/// `B(w,w)(t_i) = ∫_0^{t_i} e^{−(t_i−σ)A} P∇·(w⊗w)(σ) dσ` on the sample grid,
/// accumulated interval by interval, with `w(σ)` interpolated between samples.
fn bilinear_on_grid(
    prop: &dyn Propagator,
    times: &[f64],
    states: &[VectorField],
    cfg: &DuhamelConfig,
) -> Result<Vec<VectorField>> {
    let forcing: Vec<VectorField> = states.iter().map(nonlinear_term).collect::<Result<_>>()?;
    let source = |s: f64| -> Result<VectorField> { Ok(interpolate(times, &forcing, s)) };
    let mut out = vec![VectorField::zeros(states[0].grid())];
    for i in 1..times.len() {
        let carried = prop.propagate(&out[i - 1], times[i] - times[i - 1])?;
        let (local, _) = duhamel(&source, times[i - 1], times[i], prop, cfg)?;
        out.push(&carried + &local);
    }
    Ok(out)
}

/// Successive approximation `w_{m+1} = e^{−tA}b − B(w_m, w_m)` on the sample
/// grid `{0} ∪ samples`. Source values between samples come from cubic
/// interpolation of `P∇·(w_m⊗w_m)`.
pub fn solve_perturbation_picard(
    b: &VectorField,
    prop: &dyn Propagator,
    samples: &[f64],
    cfg: &PicardConfig,
) -> Result<(EvolutionPath, PicardReport)> {
    let defect = b.divergence_defect();
    if defect > crate::field::SOLENOIDAL_TOL {
        return Err(Error::NotSolenoidal(defect));
    }
    let mut times = vec![0.0];
    times.extend(samples.iter().copied().filter(|&t| t != 0.0));
    if times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidArgument("sample times must be increasing and positive".into()));
    }
    let sp = critical_s(b.dim(), cfg.p);
    let norm = |v: &VectorField| besov(v, sp, cfg.p, f64::INFINITY);
    let mut w0 = vec![b.clone()];
    w0.extend(propagate_path(prop, b, &times[1..])?);
    let mut cur = w0.clone();
    let mut increments: Vec<f64> = Vec::new();
    let mut growing = 0;
    for it in 1..=cfg.max_iters {
        let bw = bilinear_on_grid(prop, &times, &cur, &cfg.duhamel)?;
        let next: Vec<VectorField> = w0.iter().zip(&bw).map(|(a, d)| a - d).collect();
        let inc = cur.iter().zip(&next).map(|(x, y)| norm(&(y - x))).fold(0.0, f64::max);
        let scale = next.iter().map(norm).fold(0.0, f64::max);
        if !inc.is_finite() {
            return Err(Error::PicardDivergence(it));
        }
        debug!("picard iteration {it}: increment {inc:.3e}");
        if increments.last().is_some_and(|&prev| inc > prev) {
            growing += 1;
            if growing >= 3 {
                return Err(Error::PicardDivergence(it));
            }
        } else {
            growing = 0;
        }
        increments.push(inc);
        if inc <= cfg.tol * scale {
            // `inc` is exactly the integral-equation residual of `cur`.
            let residual = if scale > 0.0 { inc / scale } else { 0.0 };
            let path = EvolutionPath::new(times, cur)?;
            return Ok((path, PicardReport { iterations: it, increments, residual }));
        }
        cur = next;
    }
    Err(Error::PicardDivergence(cfg.max_iters))
}
