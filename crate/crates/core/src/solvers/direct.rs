use log::debug;
use serde::Serialize;

use super::path::EvolutionPath;
use crate::error::{Error, Result};
use crate::field::VectorField;
use crate::multipliers::leray_project;
use crate::perturbed::{nonlinear_term, EtdCoefficients};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DirectConfig {
    /// Largest step; each interval between samples is split uniformly.
    pub dt: f64,
    /// Switches the convective term off (heat-flow fixtures).
    pub nonlinear: bool,
    /// Allowed relative growth of `‖u‖_{L²}` per step when unforced.
    pub energy_tol: f64,
}

impl Default for DirectConfig {
    fn default() -> Self {
        DirectConfig { dt: 1e-3, nonlinear: true, energy_tol: 1e-10 }
    }
}

/// `∂_t u − Δu + P∇·(u⊗u) = Pf`, `u(0) = a`, by ETD2RK steps landing exactly
/// on every sample time. The returned path starts with `(0, a)`.
pub fn solve_ns_direct(
    a: &VectorField,
    f: Option<&VectorField>,
    samples: &[f64],
    cfg: &DirectConfig,
) -> Result<EvolutionPath> {
    let defect = a.divergence_defect();
    if defect > crate::field::SOLENOIDAL_TOL {
        return Err(Error::NotSolenoidal(defect));
    }
    if !(cfg.dt > 0.0) {
        return Err(Error::InvalidArgument(format!("dt must be positive, got {}", cfg.dt)));
    }
    if let Some(f) = f {
        if !f.grid().same_as(a.grid()) {
            return Err(Error::GridMismatch);
        }
    }
    let pf = f.map(leray_project).filter(|g| g.max_abs_coeff() > 0.0);
    let nonlinear = |u: &VectorField| -> Result<VectorField> {
        let mut out = if cfg.nonlinear { nonlinear_term(u)?.scale(-1.0) } else { VectorField::zeros(u.grid()) };
        if let Some(g) = &pf {
            out = &out + g;
        }
        Ok(out)
    };
    let mut times = vec![0.0];
    let mut states = vec![a.clone()];
    let mut u = a.clone();
    let mut t = 0.0;
    let mut cache: Option<EtdCoefficients> = None;
    for &ts in samples {
        if ts == 0.0 && t == 0.0 {
            continue;
        }
        if !(ts > t) {
            return Err(Error::InvalidArgument(format!("sample times must be increasing and positive, got {ts} after {t}")));
        }
        let steps = ((ts - t) / cfg.dt - 1e-9).ceil().max(1.0) as usize;
        let h = (ts - t) / steps as f64;
        if cache.as_ref().is_none_or(|c| (c.h - h).abs() > 1e-14 * h) {
            cache = Some(EtdCoefficients::new(a.grid(), h));
        }
        let coeffs = cache.as_ref().expect("coefficients cached");
        for i in 0..steps {
            let e_prev = u.energy();
            u = coeffs.step(&u, &nonlinear)?;
            let e = u.energy();
            let tn = t + (i + 1) as f64 * h;
            if !e.is_finite() {
                return Err(Error::UnstableStep { t: tn, growth: f64::INFINITY });
            }
            if pf.is_none() && e_prev > 0.0 && e.sqrt() > e_prev.sqrt() * (1.0 + cfg.energy_tol) {
                return Err(Error::UnstableStep { t: tn, growth: (e / e_prev).sqrt() });
            }
        }
        t = ts;
        debug!("direct solver reached t = {t}");
        times.push(t);
        states.push(u.clone());
    }
    EvolutionPath::new(times, states)
}
