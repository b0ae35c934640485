use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::background::Background;
use super::neumann::{resolvent_a, NeumannConfig};
use crate::error::{Error, Result};
use crate::field::VectorField;
use crate::multipliers::{SectorPoint, DEFAULT_OMEGA};
use crate::quadrature::GaussLegendre;

/// Discretization of `Γ = Γ_− ∪ Γ_0 ∪ Γ_+`: the unit arc `|ψ| >= θ` and the
/// rays `r e^{±iθ}`, `1 <= r <= r_max`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ContourSpec {
    pub theta: f64,
    pub nodes_arc: usize,
    pub nodes_ray: usize,
    pub r_max: f64,
}

/// Relative tail tolerance used by [`semigroup_contour`] callers by default.
pub const DEFAULT_CONTOUR_TOL: f64 = 1e-6;

impl ContourSpec {
    /// `θ = π/3`, 64 arc nodes, 96 nodes per ray, `r_max = max(50, 30/t)`.
    pub fn default_for(t: f64) -> Self {
        ContourSpec { theta: PI / 3.0, nodes_arc: 64, nodes_ray: 96, r_max: (30.0 / t).max(50.0) }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.theta > DEFAULT_OMEGA && self.theta < PI / 2.0) {
            return Err(Error::ThetaOutOfRange(self.theta));
        }
        if self.nodes_arc < 8 || self.nodes_ray < 8 {
            return Err(Error::InvalidArgument("contour node counts must be >= 8".into()));
        }
        if !(self.r_max >= 10.0) {
            return Err(Error::InvalidArgument(format!("r_max = {} must be >= 10", self.r_max)));
        }
        Ok(())
    }

    /// Same contour with twice the nodes on every piece.
    pub fn doubled(&self) -> Self {
        ContourSpec { nodes_arc: 2 * self.nodes_arc, nodes_ray: 2 * self.nodes_ray, ..*self }
    }

    /// Quadrature nodes `λ` with weights that already include `e^{−tλ} dλ / (2πi)`.
    /// The upper ray runs inward, the arc counterclockwise through `−1`, the
    /// lower ray outward, so the contour winds positively around `[0, ∞)`.
    pub fn nodes(&self, t: f64) -> Vec<(Complex64, Complex64)> {
        let two_pi_i = Complex64::new(0.0, 2.0 * PI);
        let mut out = Vec::with_capacity(self.nodes_arc + 2 * self.nodes_ray);
        let ray = GaussLegendre::new(self.nodes_ray);
        let umax = self.r_max.ln();
        let up = Complex64::from_polar(1.0, self.theta);
        for (u, w) in ray.mapped(0.0, umax) {
            let r = u.exp();
            let lambda = up * r;
            out.push((lambda, -(-t * lambda).exp() * up * r * w / two_pi_i));
        }
        let arc = GaussLegendre::new(self.nodes_arc);
        for (psi, w) in arc.mapped(self.theta, 2.0 * PI - self.theta) {
            let lambda = Complex64::from_polar(1.0, psi);
            out.push((lambda, (-t * lambda).exp() * Complex64::new(0.0, 1.0) * lambda * w / two_pi_i));
        }
        let down = up.conj();
        for (u, w) in ray.mapped(0.0, umax) {
            let r = u.exp();
            let lambda = down * r;
            out.push((lambda, (-t * lambda).exp() * down * r * w / two_pi_i));
        }
        out
    }

    /// Bound on the truncated ray tails relative to `‖f‖`, using
    /// `‖R_A(λ)‖ <= (1 + ‖U‖_{L^{n,∞}}) / (r sin θ)` along the rays.
    pub fn tail_bound(&self, t: f64, weak_ln: f64) -> f64 {
        let c = self.theta.cos();
        (-t * self.r_max * c).exp() / (t * c) * (1.0 + weak_ln) / (self.r_max * self.theta.sin()) / PI
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ContourReport {
    pub tail_bound: f64,
    pub imag_residue: f64,
    pub nodes: usize,
    pub max_neumann_terms: usize,
}

/// `e^{−tA} f = (1/2πi) ∫_Γ e^{−tλ} R_A(λ) f dλ` by Gauss–Legendre quadrature
/// on each piece of the contour. For real `f` the anti-Hermitian residue must
/// stay below `1e-9` relative to `max(‖result‖, ‖f‖)` and is then discarded.
pub fn semigroup_contour(
    f: &VectorField,
    t: f64,
    bg: &Background,
    spec: &ContourSpec,
    neumann: &NeumannConfig,
    tol: f64,
) -> Result<(VectorField, ContourReport)> {
    if !(t > 0.0) {
        return Err(Error::NegativeTime(t));
    }
    spec.validate()?;
    let tail_bound = spec.tail_bound(t, bg.weak_ln_norm());
    if tail_bound > tol {
        return Err(Error::TailBoundViolation { bound: tail_bound, tol });
    }
    let nodes = spec.nodes(t);
    let mut acc = VectorField::zeros(f.grid());
    let mut max_terms = 0;
    let chunk = rayon::current_num_threads().max(1);
    for group in nodes.chunks(chunk) {
        let results = group
            .par_iter()
            .map(|&(lambda, w)| {
                let pt = SectorPoint::new(lambda, DEFAULT_OMEGA)?;
                let (r, rep) = resolvent_a(f, pt, bg, neumann)?;
                Ok((w, r, rep.terms_used))
            })
            .collect::<Result<Vec<_>>>()?;
        for (w, r, terms) in results {
            acc.axpy(w, &r);
            max_terms = max_terms.max(terms);
        }
    }
    let mut imag_residue = 0.0;
    if f.is_real() {
        let re = acc.real_part();
        // Rounding scales with the input, so small outputs (large t) are judged against `f`.
        let total = acc.energy().sqrt().max(f.energy().sqrt());
        imag_residue = if total > 0.0 { (&acc - &re).energy().sqrt() / total } else { 0.0 };
        if imag_residue > 1e-9 {
            return Err(Error::ImaginaryResidue(imag_residue));
        }
        acc = re;
    }
    let report = ContourReport { tail_bound, imag_residue, nodes: nodes.len(), max_neumann_terms: max_terms };
    Ok((acc, report))
}
