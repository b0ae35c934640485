use log::debug;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::VectorField;
use crate::multipliers::{frac_laplacian, leray_project};
use crate::norms::{besov, critical_s};
use crate::perturbed::nonlinear_term;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct StationaryConfig {
    pub p: f64,
    /// Extra regularity index in `(0, 1)` whose norm ratio is also reported.
    pub s_extra: Option<f64>,
    /// Tolerance on the relative residual `‖Φ(U) − U‖ / ‖U_0‖` in `Ḃ^{s(p)}_{p,∞}`.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for StationaryConfig {
    fn default() -> Self {
        StationaryConfig { p: 2.0, s_extra: None, tol: 1e-8, max_iter: 100 }
    }
}

#[derive(Clone, Debug)]
pub struct StationaryResult {
    pub u: VectorField,
    pub iterations: usize,
    pub increments: Vec<f64>,
    pub contraction_factors: Vec<f64>,
    /// `‖U‖_{Ḃ^{s(p)}_{p,∞}}`.
    pub norm: f64,
    /// `‖f‖_{Ḃ^{s(p)−2}_{p,∞}}`.
    pub forcing_norm: f64,
    /// `(‖U‖_{Ḃ^s_{p,∞}}, ‖U‖_{Ḃ^s_{p,∞}} / ‖f‖_{Ḃ^{s−2}_{p,∞}})` for `s = s_extra`.
    pub extra: Option<(f64, f64)>,
    /// `‖U + (−Δ)^{−1}P∇·(U⊗U) − (−Δ)^{−1}Pf‖ / ‖(−Δ)^{−1}Pf‖` in `Ḃ^{s(p)}_{p,∞}`.
    /// `iterations` counts Picard updates applied to `U_0`; the map is evaluated once more to certify this.
    pub residual: f64,
}

impl StationaryResult {
    pub fn ratio(&self) -> f64 {
        if self.forcing_norm > 0.0 {
            self.norm / self.forcing_norm
        } else {
            0.0
        }
    }
}

/// `U_0 = (−Δ)^{−1} P f`.
pub fn stationary_initial(f: &VectorField) -> VectorField {
    frac_laplacian(&leray_project(f), -2.0)
}

/// One Picard step `U_0 − (−Δ)^{−1} P∇·(U_m ⊗ U_m)`.
pub fn stationary_map(u0: &VectorField, um: &VectorField) -> Result<VectorField> {
    Ok(u0 - &frac_laplacian(&nonlinear_term(um)?, -2.0))
}

fn check_p(n: usize, p: f64) -> Result<()> {
    let n = n as f64;
    if !(n >= 3.0 && p > n / 2.0 && p < n) {
        return Err(Error::ExponentOutOfRange(format!("stationary problem needs n >= 3 and n/2 < p < n, got n = {n}, p = {p}")));
    }
    Ok(())
}

/// Picard iteration for `U = (−Δ)^{−1}Pf − (−Δ)^{−1}P∇·(U⊗U)`. Fails with
/// `NonContraction` once the increment ratio stays `>= 1` for five
/// consecutive iterations, or when `max_iter` is exhausted.
pub fn solve_stationary(f: &VectorField, cfg: &StationaryConfig) -> Result<StationaryResult> {
    let n = f.dim();
    check_p(n, cfg.p)?;
    if let Some(s) = cfg.s_extra {
        if !(s > 0.0 && s < 1.0) {
            return Err(Error::ExponentOutOfRange(format!("s_extra must lie in (0, 1), got {s}")));
        }
    }
    let sp = critical_s(n, cfg.p);
    let norm = |v: &VectorField| besov(v, sp, cfg.p, f64::INFINITY);
    let u0 = stationary_initial(f);
    let u0_norm = norm(&u0);
    let mut cur = u0.clone();
    let mut increments: Vec<f64> = Vec::new();
    let mut factors = Vec::new();
    let mut growing = 0;
    let mut iterations = 0;
    // `inc` is the exact residual of `cur`; the loop returns the first iterate
    // whose residual meets the tolerance.
    let residual = loop {
        let next = stationary_map(&u0, &cur)?;
        let inc = norm(&(&next - &cur));
        if !inc.is_finite() {
            return Err(Error::NonContraction { iteration: iterations, factor: f64::INFINITY });
        }
        let rel = if u0_norm > 0.0 { inc / u0_norm } else { inc };
        if rel <= cfg.tol {
            break rel;
        }
        if let Some(&prev) = increments.last() {
            let factor: f64 = if prev > 0.0 { inc / prev } else { 0.0 };
            factors.push(factor);
            growing = if factor >= 1.0 { growing + 1 } else { 0 };
            if growing >= 5 {
                return Err(Error::NonContraction { iteration: iterations, factor });
            }
        }
        increments.push(inc);
        if iterations >= cfg.max_iter {
            let factor = factors.last().copied().unwrap_or(f64::NAN);
            return Err(Error::NonContraction { iteration: iterations, factor });
        }
        iterations += 1;
        debug!("stationary iteration {iterations}: increment {inc:.3e}");
        cur = next;
    };
    let forcing_norm = besov(f, sp - 2.0, cfg.p, f64::INFINITY);
    let extra = cfg.s_extra.map(|s| {
        let un = besov(&cur, s, cfg.p, f64::INFINITY);
        let fnorm = besov(f, s - 2.0, cfg.p, f64::INFINITY);
        (un, if fnorm > 0.0 { un / fnorm } else { 0.0 })
    });
    Ok(StationaryResult {
        norm: norm(&cur),
        u: cur,
        iterations,
        increments,
        contraction_factors: factors,
        forcing_norm,
        extra,
        residual,
    })
}

/// Largest amplitude `c` (to relative precision `2^{−steps}`) for which
/// [`solve_stationary`] converges on `c·f`, found by doubling then bisection.
pub fn contraction_threshold(f: &VectorField, cfg: &StationaryConfig, steps: usize) -> Result<f64> {
    let ok = |c: f64| match solve_stationary(&f.scale(c), cfg) {
        Ok(_) => Ok(true),
        Err(Error::NonContraction { .. }) => Ok(false),
        Err(e) => Err(e),
    };
    let (mut lo, mut hi) = (0.0, 1.0);
    while ok(hi)? {
        lo = hi;
        hi *= 2.0;
        if hi > 1e12 {
            return Err(Error::InvalidArgument("forcing never leaves the contractive regime".into()));
        }
    }
    if lo == 0.0 {
        lo = hi / 2.0;
        while !ok(lo)? {
            hi = lo;
            lo /= 2.0;
            if lo < 1e-12 {
                return Err(Error::InvalidArgument("forcing is never contractive".into()));
            }
        }
    }
    for _ in 0..steps {
        let mid = 0.5 * (lo + hi);
        if ok(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}
