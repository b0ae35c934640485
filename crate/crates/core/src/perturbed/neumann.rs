use num_complex::Complex64;
use serde::Serialize;

use super::background::Background;
use super::operator::apply_b;
use crate::error::{Error, Result};
use crate::field::VectorField;
use crate::multipliers::{resolvent_laplacian, SectorPoint};
use crate::norms::{besov, critical_s};

/// Stopping rule for the Neumann series of `R_A(λ)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NeumannConfig {
    /// Increment tolerance in `Ḃ^{s(p)}_{p,∞}`, relative to `‖R_Δ(λ) f‖`.
    pub tol: f64,
    pub max_terms: usize,
    pub p: f64,
}

impl Default for NeumannConfig {
    fn default() -> Self {
        NeumannConfig { tol: 1e-10, max_terms: 200, p: 2.0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NeumannReport {
    pub terms_used: usize,
    pub last_term_norm: f64,
    pub converged: bool,
    /// Relative increment norms, one per computed term after the first.
    pub increments: Vec<f64>,
}

/// `R_A(λ) f = Σ_ℓ [R_Δ(λ) B]^ℓ R_Δ(λ) f`, truncated when the relative
/// increment drops below `cfg.tol`; diverges after three growing increments.
pub fn resolvent_a(
    f: &VectorField,
    pt: SectorPoint,
    bg: &Background,
    cfg: &NeumannConfig,
) -> Result<(VectorField, NeumannReport)> {
    let n = f.dim();
    let s = critical_s(n, cfg.p);
    let norm = |v: &VectorField| besov(v, s, cfg.p, f64::INFINITY);
    let mut term = resolvent_laplacian(f, pt, 2.0)?;
    let mut sum = term.clone();
    let reference = norm(&term);
    if bg.is_zero() || reference == 0.0 {
        let report = NeumannReport { terms_used: 1, last_term_norm: 0.0, converged: true, increments: vec![] };
        return Ok((sum, report));
    }
    let mut increments = Vec::new();
    let mut growing = 0;
    let mut terms_used = 1;
    loop {
        term = resolvent_laplacian(&apply_b(&term, bg)?, pt, 2.0)?;
        let rel = norm(&term) / reference;
        sum.axpy(Complex64::new(1.0, 0.0), &term);
        terms_used += 1;
        if let Some(&prev) = increments.last() {
            growing = if rel > prev { growing + 1 } else { 0 };
        }
        increments.push(rel);
        if rel < cfg.tol {
            let report = NeumannReport { terms_used, last_term_norm: rel, converged: true, increments };
            return Ok((sum, report));
        }
        if growing >= 3 || !rel.is_finite() {
            return Err(Error::NeumannDivergence { terms: terms_used, last: rel });
        }
        if terms_used >= cfg.max_terms {
            return Err(Error::NeumannNotConverged { terms: terms_used, rel });
        }
    }
}

/// `(λ − A) g` for checking `(λ − A) R_A(λ) = 1`.
pub fn lambda_minus_a(g: &VectorField, lambda: Complex64, bg: &Background) -> Result<VectorField> {
    let mut out = crate::multipliers::lambda_plus_laplacian(g, lambda);
    out.axpy(Complex64::new(-1.0, 0.0), &apply_b(g, bg)?);
    Ok(out)
}
