use num_complex::Complex64;
use rayon::prelude::*;

use super::background::Background;
use crate::error::{Error, Result};
use crate::field::{SpectralField, VectorField};
use crate::grid::Grid;
use crate::multipliers::{frac_laplacian, laplacian, leray_project};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// `P ∇·T` for a physical tensor `T_ab` (flat `a*n + b`), with
/// `(∇·T)_i = Σ_j ∂_j T_ji`. Dealiased after the forward transform.
fn projected_divergence_of(grid: &Grid, tensor: Vec<Vec<Complex64>>, real: bool) -> Result<VectorField> {
    let n = grid.dim();
    let hats: Vec<SpectralField> = tensor
        .into_par_iter()
        .map(|t| SpectralField::from_complex_samples(grid, t, real))
        .collect::<Result<Vec<_>>>()?;
    let keep = grid.keep_mask();
    let comps: Vec<SpectralField> = (0..n)
        .map(|i| {
            let coeffs: Vec<Complex64> = (0..grid.len())
                .into_par_iter()
                .map(|idx| {
                    if !keep[idx] {
                        return ZERO;
                    }
                    let k = grid.wavevector(idx);
                    let mut s = ZERO;
                    for (j, &kj) in k.iter().enumerate().take(n) {
                        s += hats[j * n + i].coeffs()[idx] * Complex64::new(0.0, kj);
                    }
                    s
                })
                .collect();
            SpectralField::from_coeffs(grid, coeffs, real)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(leray_project(&VectorField::new(comps)?))
}

fn complex_samples(v: &VectorField) -> Vec<Vec<Complex64>> {
    let d = v.dealiased();
    (0..d.dim()).into_par_iter().map(|i| d.component(i).to_complex_samples()).collect()
}

/// `P∇·(g ⊗ h)` with `(g⊗h)_ab = g_a h_b`.
pub fn projected_divergence(g: &VectorField, h: &VectorField) -> Result<VectorField> {
    if g.grid() != h.grid() {
        return Err(Error::GridMismatch);
    }
    let grid = g.grid().clone();
    let n = grid.dim();
    let gs = complex_samples(g);
    let hs = if std::ptr::eq(g, h) { gs.clone() } else { complex_samples(h) };
    let tensor: Vec<Vec<Complex64>> = (0..n * n)
        .into_par_iter()
        .map(|ab| {
            let (a, b) = (ab / n, ab % n);
            gs[a].iter().zip(&hs[b]).map(|(x, y)| x * y).collect()
        })
        .collect();
    projected_divergence_of(&grid, tensor, g.is_real() && h.is_real())
}

/// Quadratic Navier–Stokes term `P∇·(u ⊗ u)`.
pub fn nonlinear_term(u: &VectorField) -> Result<VectorField> {
    projected_divergence(u, u)
}

/// `B[w] = P∇·(U ⊗ w + w ⊗ U)`.
pub fn apply_b(w: &VectorField, bg: &Background) -> Result<VectorField> {
    if w.grid() != bg.grid() {
        return Err(Error::GridMismatch);
    }
    let grid = w.grid().clone();
    if bg.is_zero() {
        return Ok(VectorField::zeros(&grid));
    }
    let n = grid.dim();
    let ws = complex_samples(w);
    let us = bg.samples();
    let tensor: Vec<Vec<Complex64>> = (0..n * n)
        .into_par_iter()
        .map(|ab| {
            let (a, b) = (ab / n, ab % n);
            (0..grid.len()).map(|x| ws[b][x] * us[a][x] + ws[a][x] * us[b][x]).collect()
        })
        .collect();
    projected_divergence_of(&grid, tensor, w.is_real())
}

/// `A[w] = −Δw + B[w]`.
pub fn apply_a(w: &VectorField, bg: &Background) -> Result<VectorField> {
    let mut out = apply_b(w, bg)?;
    out.axpy(Complex64::new(-1.0, 0.0), &laplacian(w));
    Ok(out)
}

/// `C_θ = (−Δ)^{−(2−θ)/2} B (−Δ)^{−θ/2}`, `θ ∈ [0, 2]`.
pub fn apply_c_theta(w: &VectorField, bg: &Background, theta: f64) -> Result<VectorField> {
    if !(0.0..=2.0).contains(&theta) {
        return Err(Error::ThetaOutOfRange(theta));
    }
    let inner = frac_laplacian(w, -theta);
    Ok(frac_laplacian(&apply_b(&inner, bg)?, -(2.0 - theta)))
}
