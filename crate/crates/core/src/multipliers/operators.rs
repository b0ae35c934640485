use num_complex::Complex64;

use super::symbol::{apply_multiplier, MultiplierSymbol, SectorPoint};
use crate::error::{Error, Result};
use crate::field::{ModeMap, SpectralField, VectorField};
use crate::norms::besov;

/// Leray projection with symbol `δ_ij − ξ_i ξ_j / |ξ|²`.
pub fn leray_project(v: &VectorField) -> VectorField {
    let grid = v.grid().clone();
    let n = v.dim();
    let mut comps: Vec<Vec<Complex64>> = vec![vec![Complex64::new(0.0, 0.0); grid.len()]; n];
    let src: Vec<&[Complex64]> = (0..n).map(|i| v.component(i).coeffs()).collect();
    for idx in 1..grid.len() {
        let k = grid.wavevector(idx);
        let k2 = grid.k2(idx);
        let mut kdot = Complex64::new(0.0, 0.0);
        for a in 0..n {
            kdot += src[a][idx] * k[a];
        }
        let kdot = kdot / k2;
        for a in 0..n {
            comps[a][idx] = src[a][idx] - kdot * k[a];
        }
    }
    let real: Vec<bool> = (0..n).map(|i| v.component(i).is_real()).collect();
    let all_real = real.iter().all(|&r| r);
    VectorField::new(
        comps
            .into_iter()
            .map(|c| SpectralField::from_coeffs(&grid, c, all_real).expect("shape"))
            .collect(),
    )
    .expect("shape")
}

/// `∇φ` with symbol `i ξ`.
pub fn gradient(phi: &SpectralField) -> VectorField {
    let grid = phi.grid().clone();
    VectorField::new(
        (0..grid.dim())
            .map(|a| phi.map(true, |i, c| Complex64::new(0.0, grid.wavevector(i)[a]) * c))
            .collect(),
    )
    .expect("shape")
}

/// `∇·v` with symbol `i ξ·`.
pub fn divergence(v: &VectorField) -> SpectralField {
    let grid = v.grid().clone();
    let mut out = SpectralField::zeros(&grid);
    for a in 0..v.dim() {
        let d = v.component(a).map(true, |i, c| Complex64::new(0.0, grid.wavevector(i)[a]) * c);
        out.axpy(Complex64::new(1.0, 0.0), &d);
    }
    out.set_real(v.is_real());
    out
}

/// `(−Δ)^{a/2}`, symbol `|ξ|^a`.
pub fn frac_laplacian<T: ModeMap>(f: &T, a: f64) -> T {
    let grid = f.grid().clone();
    if a == 2.0 {
        return f.map_modes(true, |i, c| c * grid.k2(i));
    }
    if a == -2.0 {
        return f.map_modes(true, |i, c| if i == 0 { c } else { c / grid.k2(i) });
    }
    f.map_modes(true, |i, c| c * grid.k2(i).powf(a / 2.0))
}

/// `Δ f`, symbol `−|ξ|²`.
pub fn laplacian<T: ModeMap>(f: &T) -> T {
    let grid = f.grid().clone();
    f.map_modes(true, |i, c| -c * grid.k2(i))
}

/// `(λ − |ξ|²)^{−b/2}`; `b = 2` is `R_Δ(λ) = (λ + Δ)^{−1}`.
pub fn resolvent_laplacian<T: ModeMap>(f: &T, pt: SectorPoint, b: f64) -> Result<T> {
    if !(b >= 0.0) {
        return Err(Error::InvalidArgument(format!("b must be non-negative, got {b}")));
    }
    apply_multiplier(&MultiplierSymbol::resolvent(pt, b), f)
}

/// `(λ + Δ) f`, the algebraic inverse of `R_Δ(λ)`.
pub fn lambda_plus_laplacian<T: ModeMap>(f: &T, lambda: Complex64) -> T {
    let grid = f.grid().clone();
    f.map_modes(lambda.im == 0.0, |i, c| c * (lambda - grid.k2(i)))
}

/// `|ξ|^a (λ − |ξ|²)^{−b/2}` with `0 <= a <= b`.
pub fn composition<T: ModeMap>(f: &T, pt: SectorPoint, a: f64, b: f64) -> Result<T> {
    if !(0.0 <= a && a <= b) {
        return Err(Error::InvalidArgument(format!("composition needs 0 <= a <= b, got a = {a}, b = {b}")));
    }
    apply_multiplier(&MultiplierSymbol::composition(pt, a, b), f)
}

/// `e^{tΔ}`, symbol `e^{−t|ξ|²}`.
pub fn heat_semigroup<T: ModeMap>(f: &T, t: f64) -> Result<T> {
    if !(t >= 0.0) {
        return Err(Error::NegativeTime(t));
    }
    let grid = f.grid().clone();
    Ok(f.map_modes(true, |i, c| c * (-t * grid.k2(i)).exp()))
}

/// Empirical side of the `L^p → L^{p0}` resolvent gain.
#[derive(Clone, Debug, PartialEq)]
pub struct GainReport {
    /// `‖R f‖_{Ḃ^s_{p0,q}}`.
    pub lhs: f64,
    /// `|λ|^{−(b − n(1/p − 1/p0))/2} ‖f‖_{Ḃ^s_{p,q}}`.
    pub rhs_scale: f64,
    pub ratio: f64,
    /// `−(b − n(1/p − 1/p0))/2`.
    pub exponent: f64,
}

/// Resolvent power together with the certified `L^p → L^{p0}` ratio, under `b >= n/p`.
#[allow(clippy::too_many_arguments)]
pub fn resolvent_lp_gain<T: ModeMap>(
    f: &T,
    pt: SectorPoint,
    b: f64,
    s: f64,
    p: f64,
    p0: f64,
    q: f64,
) -> Result<(T, GainReport)> {
    let n = f.grid().dim() as f64;
    if !(b >= n / p) {
        return Err(Error::ConditionBViolation { b, required: n / p });
    }
    if !(p0 > p) {
        return Err(Error::ExponentOutOfRange(format!("need p0 > p, got p = {p}, p0 = {p0}")));
    }
    let out = resolvent_laplacian(f, pt, b)?;
    let exponent = -(b - n * (1.0 / p - 1.0 / p0)) / 2.0;
    let lhs = besov(&out, s, p0, q);
    let rhs_scale = pt.lambda.norm().powf(exponent) * besov(f, s, p, q);
    let ratio = if rhs_scale > 0.0 { lhs / rhs_scale } else { f64::NAN };
    Ok((out, GainReport { lhs, rhs_scale, ratio, exponent }))
}
