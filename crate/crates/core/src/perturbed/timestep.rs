use num_complex::Complex64;
use rayon::prelude::*;

use super::background::Background;
use super::contour::{semigroup_contour, ContourSpec, DEFAULT_CONTOUR_TOL};
use super::neumann::NeumannConfig;
use super::operator::apply_b;
use crate::error::{Error, Result};
use crate::field::VectorField;
use crate::grid::Grid;
use crate::multipliers::heat_semigroup;

/// Per-mode coefficients of one exponential Runge–Kutta step of size `h` for
/// `u' = Δu + N(u)`: `e^{−h|k|²}`, `h φ1(−h|k|²)`, `h φ2(−h|k|²)`.
#[derive(Clone, Debug)]
pub struct EtdCoefficients {
    pub h: f64,
    e: Vec<f64>,
    p1: Vec<f64>,
    p2: Vec<f64>,
}

fn phi12(z: f64) -> (f64, f64) {
    if z.abs() < 1e-2 {
        let p1 = 1.0 + z * (1.0 / 2.0 + z * (1.0 / 6.0 + z * (1.0 / 24.0 + z * (1.0 / 120.0 + z / 720.0))));
        let p2 = 0.5 + z * (1.0 / 6.0 + z * (1.0 / 24.0 + z * (1.0 / 120.0 + z * (1.0 / 720.0 + z / 5040.0))));
        (p1, p2)
    } else {
        let em1 = z.exp_m1();
        (em1 / z, (em1 - z) / (z * z))
    }
}

impl EtdCoefficients {
    pub fn new(grid: &Grid, h: f64) -> Self {
        let (e, (p1, p2)): (Vec<f64>, (Vec<f64>, Vec<f64>)) = grid
            .k2_all()
            .par_iter()
            .map(|&k2| {
                let z = -h * k2;
                let (a, b) = phi12(z);
                (z.exp(), (h * a, h * b))
            })
            .unzip();
        EtdCoefficients { h, e, p1, p2 }
    }

    /// Cox–Matthews ETD2RK: `a = e^{hL}u + hφ1 N(u)`, `u' = a + hφ2 (N(a) − N(u))`.
    /// Exact for the linear part and for fixed points of `L u + N(u) = 0`.
    pub fn step<F>(&self, u: &VectorField, nonlinear: &F) -> Result<VectorField>
    where
        F: Fn(&VectorField) -> Result<VectorField> + ?Sized,
    {
        let nu = nonlinear(u)?;
        let a = combine(u, &nu, |i, x, y| self.e[i] * x + self.p1[i] * y);
        let na = nonlinear(&a)?;
        let diff = &na - &nu;
        Ok(combine(&a, &diff, |i, x, y| x + self.p2[i] * y))
    }
}

/// `out_c(k) = f(k, x_c(k), y_c(k))` for real per-mode coefficients.
fn combine<F>(x: &VectorField, y: &VectorField, f: F) -> VectorField
where
    F: Fn(usize, Complex64, Complex64) -> Complex64 + Sync,
{
    let mut out = x.clone();
    for c in 0..x.dim() {
        let yc = y.component(c).coeffs();
        let real = x.component(c).is_real() && y.component(c).is_real();
        let comp = &mut out.components_mut()[c];
        comp.coeffs_mut().par_iter_mut().enumerate().for_each(|(i, z)| *z = f(i, *z, yc[i]));
        comp.set_real(real);
    }
    out
}

/// `e^{−tA} f` by ETD2RK steps of size at most `dt` (uniform, landing on `t`),
/// with `Δ` integrated exactly and `−B` treated explicitly.
pub fn semigroup_timestep(f: &VectorField, t: f64, bg: &Background, dt: f64) -> Result<VectorField> {
    if !(t >= 0.0) {
        return Err(Error::NegativeTime(t));
    }
    if !(dt > 0.0) {
        return Err(Error::InvalidArgument(format!("dt must be positive, got {dt}")));
    }
    if t == 0.0 {
        return Ok(f.clone());
    }
    let steps = (t / dt - 1e-9).ceil().max(1.0) as usize;
    let h = t / steps as f64;
    let coeffs = EtdCoefficients::new(f.grid(), h);
    let nonlinear = |w: &VectorField| -> Result<VectorField> { Ok(apply_b(w, bg)?.scale(-1.0)) };
    let e0 = f.energy().sqrt();
    let mut u = f.clone();
    for i in 0..steps {
        u = coeffs.step(&u, &nonlinear)?;
        let e = u.energy().sqrt();
        if !e.is_finite() || (e0 > 0.0 && e > 10.0 * e0) {
            return Err(Error::UnstableStep { t: (i + 1) as f64 * h, growth: e / e0 });
        }
    }
    Ok(u)
}

/// A realization of `f ↦ e^{−tA} f`.
pub trait Propagator: Sync {
    fn background(&self) -> &Background;

    fn propagate(&self, f: &VectorField, t: f64) -> Result<VectorField>;
}

/// Exact heat multiplier (`U = 0`).
#[derive(Clone, Debug)]
pub struct HeatPropagator {
    bg: Background,
}

impl HeatPropagator {
    pub fn new(grid: &Grid) -> Self {
        HeatPropagator { bg: Background::zero(grid) }
    }
}

impl Propagator for HeatPropagator {
    fn background(&self) -> &Background {
        &self.bg
    }

    fn propagate(&self, f: &VectorField, t: f64) -> Result<VectorField> {
        heat_semigroup(f, t)
    }
}

/// [`semigroup_timestep`] with a fixed maximal step.
#[derive(Clone, Debug)]
pub struct StepPropagator {
    pub bg: Background,
    pub dt: f64,
}

impl Propagator for StepPropagator {
    fn background(&self) -> &Background {
        &self.bg
    }

    fn propagate(&self, f: &VectorField, t: f64) -> Result<VectorField> {
        semigroup_timestep(f, t, &self.bg, self.dt)
    }
}

/// [`semigroup_contour`] with the default spec for each `t`.
#[derive(Clone, Debug)]
pub struct ContourPropagator {
    pub bg: Background,
    pub neumann: NeumannConfig,
    pub tol: f64,
}

impl ContourPropagator {
    pub fn new(bg: Background) -> Self {
        ContourPropagator { bg, neumann: NeumannConfig::default(), tol: DEFAULT_CONTOUR_TOL }
    }
}

impl Propagator for ContourPropagator {
    fn background(&self) -> &Background {
        &self.bg
    }

    fn propagate(&self, f: &VectorField, t: f64) -> Result<VectorField> {
        if t == 0.0 {
            return Ok(f.clone());
        }
        let spec = ContourSpec::default_for(t);
        Ok(semigroup_contour(f, t, &self.bg, &spec, &self.neumann, self.tol)?.0)
    }
}
