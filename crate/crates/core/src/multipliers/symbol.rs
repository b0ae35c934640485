use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::{ModeMap, SpectralField};
use crate::grid::Grid;
use crate::norms::make_dyadic_partition;

/// Default sector half-angle.
pub const DEFAULT_OMEGA: f64 = PI / 6.0;

type SymbolFn = dyn Fn([f64; 3]) -> Complex64 + Send + Sync;

/// A Fourier multiplier `m(ξ)`, evaluated at nonzero wavevectors.
#[derive(Clone)]
pub struct MultiplierSymbol {
    pub name: String,
    pub degree: Option<f64>,
    /// `m(−ξ) = conj m(ξ)`, so real fields stay real.
    pub hermitian: bool,
    eval: Arc<SymbolFn>,
}

impl std::fmt::Debug for MultiplierSymbol {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("MultiplierSymbol")
            .field("name", &self.name)
            .field("degree", &self.degree)
            .finish()
    }
}

fn norm(k: [f64; 3]) -> f64 {
    (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]).sqrt()
}

/// Principal-branch `(λ − r²)^{−b/2}`; exact reciprocal for `b = 2`.
pub fn resolvent_symbol(lambda: Complex64, k2: f64, b: f64) -> Complex64 {
    let base = lambda - k2;
    if b == 2.0 {
        base.inv()
    } else if b == 0.0 {
        Complex64::new(1.0, 0.0)
    } else {
        base.powf(-b / 2.0)
    }
}

/// `(λ − r²)^{−b/2}` is real for every `r` only for real `λ` and even integer `b`.
fn real_valued(lambda: Complex64, b: f64) -> bool {
    lambda.im == 0.0 && (b / 2.0).fract() == 0.0
}

impl MultiplierSymbol {
    pub fn new(
        name: impl Into<String>,
        degree: Option<f64>,
        hermitian: bool,
        eval: impl Fn([f64; 3]) -> Complex64 + Send + Sync + 'static,
    ) -> Self {
        MultiplierSymbol { name: name.into(), degree, hermitian, eval: Arc::new(eval) }
    }

    pub fn identity() -> Self {
        MultiplierSymbol::new("identity", Some(0.0), true, |_| Complex64::new(1.0, 0.0))
    }

    /// `|ξ|^a`.
    pub fn abs_power(a: f64) -> Self {
        MultiplierSymbol::new(format!("|xi|^{a}"), Some(a), true, move |k| {
            Complex64::new(norm(k).powf(a), 0.0)
        })
    }

    /// `e^{−t|ξ|²}`.
    pub fn heat(t: f64) -> Self {
        MultiplierSymbol::new(format!("heat(t={t})"), None, true, move |k| {
            let r = norm(k);
            Complex64::new((-t * r * r).exp(), 0.0)
        })
    }

    /// `(λ − |ξ|²)^{−b/2}`.
    pub fn resolvent(pt: SectorPoint, b: f64) -> Self {
        let lambda = pt.lambda;
        MultiplierSymbol::new(format!("resolvent(b={b})"), None, real_valued(lambda, b), move |k| {
            let r = norm(k);
            resolvent_symbol(lambda, r * r, b)
        })
    }

    /// `|ξ|^a (λ − |ξ|²)^{−b/2}`.
    pub fn composition(pt: SectorPoint, a: f64, b: f64) -> Self {
        let lambda = pt.lambda;
        MultiplierSymbol::new(format!("composition(a={a},b={b})"), None, real_valued(lambda, b), move |k| {
            let r = norm(k);
            resolvent_symbol(lambda, r * r, b) * r.powf(a)
        })
    }

    pub fn eval(&self, k: [f64; 3]) -> Complex64 {
        (self.eval)(k)
    }

    /// Symbol values at every flat index (zero at `k = 0`); errors if any is non-finite.
    pub fn table(&self, grid: &Grid) -> Result<Vec<Complex64>> {
        let vals: Vec<Complex64> = (0..grid.len())
            .into_par_iter()
            .map(|i| if i == 0 { Complex64::new(0.0, 0.0) } else { self.eval(grid.wavevector(i)) })
            .collect();
        if let Some(i) = vals.iter().position(|v| !v.is_finite()) {
            return Err(Error::SymbolSingular(grid.mode(i)));
        }
        Ok(vals)
    }
}

/// A point `λ` of the sector `S_ω = {z ≠ 0 : |arg z| >= ω}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SectorPoint {
    pub lambda: Complex64,
    pub omega: f64,
}

impl SectorPoint {
    pub fn new(lambda: Complex64, omega: f64) -> Result<Self> {
        if !(omega > 0.0 && omega < PI / 2.0) {
            return Err(Error::InvalidArgument(format!("sector angle {omega} must lie in (0, pi/2)")));
        }
        if !(lambda.norm() > 0.0) || !lambda.is_finite() || lambda.arg().abs() < omega {
            return Err(Error::SectorViolation { re: lambda.re, im: lambda.im, omega });
        }
        Ok(SectorPoint { lambda, omega })
    }

    /// `r e^{iψ}` in the default sector.
    pub fn polar(r: f64, psi: f64) -> Result<Self> {
        SectorPoint::new(Complex64::from_polar(r, psi), DEFAULT_OMEGA)
    }
}

/// Pointwise path: `f̂(k) -> m(k) f̂(k)`.
pub fn apply_multiplier<T: ModeMap>(sym: &MultiplierSymbol, f: &T) -> Result<T> {
    let table = sym.table(f.grid())?;
    Ok(f.map_modes(sym.hermitian, |i, c| table[i] * c))
}

/// Dyadic path: `Σ_j F^{-1}[m φ_j f̂]`, accumulated block by block in physical space.
pub fn apply_multiplier_dyadic(sym: &MultiplierSymbol, f: &SpectralField) -> Result<SpectralField> {
    let grid = f.grid();
    let table = sym.table(grid)?;
    let part = make_dyadic_partition(grid);
    let mut acc = vec![Complex64::new(0.0, 0.0); grid.len()];
    for j in part.range() {
        let mut block = SpectralField::zeros(grid);
        {
            let dst = block.coeffs_mut();
            for &(i, w) in part.block(j) {
                let i = i as usize;
                dst[i] = table[i] * w * f.coeffs()[i];
            }
        }
        let phys = block.to_complex_samples();
        acc.par_iter_mut().zip(phys.par_iter()).for_each(|(a, b)| *a += b);
    }
    let real = f.is_real() && sym.hermitian;
    SpectralField::from_complex_samples(grid, acc, real)
}
