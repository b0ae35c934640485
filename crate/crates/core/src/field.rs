//! Spectral scalar and vector fields on a [`Grid`].

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::Grid;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Relative tolerance of the solenoidal predicate.
pub const SOLENOIDAL_TOL: f64 = 1e-10;

/// Fourier coefficients of a scalar field in FFT order.
#[derive(Clone, Debug)]
pub struct SpectralField {
    grid: Grid,
    coeffs: Vec<Complex64>,
    is_real: bool,
}

impl SpectralField {
    pub fn zeros(grid: &Grid) -> Self {
        SpectralField { grid: grid.clone(), coeffs: vec![ZERO; grid.len()], is_real: true }
    }

    /// Wraps coefficients; the zero mode is forced to zero.
    pub fn from_coeffs(grid: &Grid, mut coeffs: Vec<Complex64>, is_real: bool) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(Error::ShapeMismatch { expected: grid.len(), got: coeffs.len() });
        }
        coeffs[0] = ZERO;
        Ok(SpectralField { grid: grid.clone(), coeffs, is_real })
    }

    /// Real field `amplitude * cos(k·x)` for integer wavenumber `m`.
    pub fn cosine(grid: &Grid, m: &[i32], amplitude: f64) -> Result<Self> {
        let idx = grid
            .index_of(m)
            .ok_or_else(|| Error::InvalidArgument(format!("mode {m:?} does not fit the grid")))?;
        let mut f = SpectralField::zeros(grid);
        if idx == 0 {
            return Ok(f);
        }
        let nidx = grid.neg_index(idx);
        f.coeffs[idx] += Complex64::new(amplitude / 2.0, 0.0);
        f.coeffs[nidx] += Complex64::new(amplitude / 2.0, 0.0);
        Ok(f)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    pub fn is_real(&self) -> bool {
        self.is_real
    }

    pub fn set_real(&mut self, is_real: bool) {
        self.is_real = is_real;
    }

    /// Coefficient-wise map `c(k) -> f(idx, c(k))`. `hermitian` states whether
    /// the map preserves the reality of the field.
    pub fn map<F>(&self, hermitian: bool, f: F) -> Self
    where
        F: Fn(usize, Complex64) -> Complex64 + Sync,
    {
        let mut coeffs: Vec<Complex64> =
            self.coeffs.par_iter().enumerate().map(|(i, &c)| f(i, c)).collect();
        coeffs[0] = ZERO;
        SpectralField { grid: self.grid.clone(), coeffs, is_real: self.is_real && hermitian }
    }

    pub fn scale(&self, a: f64) -> Self {
        self.map(true, |_, c| c * a)
    }

    pub fn scale_complex(&self, a: Complex64) -> Self {
        self.map(a.im == 0.0, |_, c| c * a)
    }

    /// `self += a * other`.
    pub fn axpy(&mut self, a: Complex64, other: &SpectralField) {
        assert!(self.grid == other.grid, "grid mismatch");
        self.coeffs.par_iter_mut().zip(other.coeffs.par_iter()).for_each(|(x, y)| *x += a * y);
        self.is_real = self.is_real && other.is_real && a.im == 0.0;
    }

    /// Zeroes every mode outside the two-thirds band.
    pub fn dealiased(&self) -> Self {
        let keep = self.grid.keep_mask();
        self.map(true, |i, c| if keep[i] { c } else { ZERO })
    }

    /// `L^n Σ |c|^2`, the squared `L^2` norm by Parseval.
    pub fn energy(&self) -> f64 {
        self.grid.volume() * self.coeffs.par_iter().map(|c| c.norm_sqr()).sum::<f64>()
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.norm()))
    }

    /// Largest `|c(-k) - conj c(k)|` relative to the largest coefficient.
    pub fn hermitian_defect(&self) -> f64 {
        let scale = self.max_abs_coeff();
        if scale == 0.0 {
            return 0.0;
        }
        let d = (0..self.coeffs.len())
            .into_par_iter()
            .map(|i| (self.coeffs[self.grid.neg_index(i)] - self.coeffs[i].conj()).norm())
            .reduce(|| 0.0, f64::max);
        d / scale
    }

    /// Projection onto real fields, `(c(k) + conj c(-k)) / 2`.
    pub fn real_part(&self) -> Self {
        let coeffs: Vec<Complex64> = (0..self.coeffs.len())
            .into_par_iter()
            .map(|i| 0.5 * (self.coeffs[i] + self.coeffs[self.grid.neg_index(i)].conj()))
            .collect();
        SpectralField { grid: self.grid.clone(), coeffs, is_real: true }
    }

    /// Complex physical samples.
    pub fn to_complex_samples(&self) -> Vec<Complex64> {
        let mut data = self.coeffs.clone();
        self.grid.fft().inverse(&mut data);
        data
    }

    /// Real physical samples (the real part if the field is complex).
    pub fn to_samples(&self) -> Vec<f64> {
        self.to_complex_samples().into_iter().map(|z| z.re).collect()
    }

    pub fn from_complex_samples(grid: &Grid, samples: Vec<Complex64>, is_real: bool) -> Result<Self> {
        if samples.len() != grid.len() {
            return Err(Error::ShapeMismatch { expected: grid.len(), got: samples.len() });
        }
        let mut data = samples;
        grid.fft().forward(&mut data);
        let inv = 1.0 / grid.len() as f64;
        data.par_iter_mut().for_each(|c| *c *= inv);
        SpectralField::from_coeffs(grid, data, is_real)
    }
}

/// Forward transform of real samples; the mean is discarded.
pub fn transform(grid: &Grid, samples: &[f64]) -> Result<SpectralField> {
    if samples.len() != grid.len() {
        return Err(Error::ShapeMismatch { expected: grid.len(), got: samples.len() });
    }
    let data: Vec<Complex64> = samples.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    SpectralField::from_complex_samples(grid, data, true)
}

/// Inverse transform to real samples.
pub fn inverse_transform(field: &SpectralField) -> Vec<f64> {
    field.to_samples()
}

/// Dealiased product `f g`.
pub fn pointwise_product(f: &SpectralField, g: &SpectralField) -> Result<SpectralField> {
    if f.grid != g.grid {
        return Err(Error::GridMismatch);
    }
    let a = f.dealiased().to_complex_samples();
    let b = g.dealiased().to_complex_samples();
    let prod: Vec<Complex64> = a.par_iter().zip(b.par_iter()).map(|(x, y)| x * y).collect();
    let is_real = f.is_real && g.is_real;
    let mut out = SpectralField::from_complex_samples(&f.grid, prod, is_real)?.dealiased();
    out.is_real = is_real;
    Ok(out)
}

impl Add<&SpectralField> for &SpectralField {
    type Output = SpectralField;
    fn add(self, rhs: &SpectralField) -> SpectralField {
        let mut out = self.clone();
        out.axpy(Complex64::new(1.0, 0.0), rhs);
        out
    }
}

impl Sub<&SpectralField> for &SpectralField {
    type Output = SpectralField;
    fn sub(self, rhs: &SpectralField) -> SpectralField {
        let mut out = self.clone();
        out.axpy(Complex64::new(-1.0, 0.0), rhs);
        out
    }
}

impl Mul<f64> for &SpectralField {
    type Output = SpectralField;
    fn mul(self, a: f64) -> SpectralField {
        self.scale(a)
    }
}

impl Neg for &SpectralField {
    type Output = SpectralField;
    fn neg(self) -> SpectralField {
        self.scale(-1.0)
    }
}

/// Vector field with one scalar component per spatial axis.
#[derive(Clone, Debug)]
pub struct VectorField {
    comps: Vec<SpectralField>,
}

impl VectorField {
    pub fn new(comps: Vec<SpectralField>) -> Result<Self> {
        let first = comps.first().ok_or(Error::ShapeMismatch { expected: 1, got: 0 })?;
        let grid = first.grid.clone();
        if comps.len() != grid.dim() {
            return Err(Error::ShapeMismatch { expected: grid.dim(), got: comps.len() });
        }
        if comps.iter().any(|c| c.grid != grid) {
            return Err(Error::GridMismatch);
        }
        Ok(VectorField { comps })
    }

    pub fn zeros(grid: &Grid) -> Self {
        VectorField { comps: (0..grid.dim()).map(|_| SpectralField::zeros(grid)).collect() }
    }

    pub fn grid(&self) -> &Grid {
        self.comps[0].grid()
    }

    pub fn dim(&self) -> usize {
        self.comps.len()
    }

    pub fn component(&self, i: usize) -> &SpectralField {
        &self.comps[i]
    }

    pub fn components_mut(&mut self) -> &mut [SpectralField] {
        &mut self.comps
    }

    pub fn into_components(self) -> Vec<SpectralField> {
        self.comps
    }

    pub fn is_real(&self) -> bool {
        self.comps.iter().all(|c| c.is_real)
    }

    /// Componentwise map `c_i(k) -> f(i, idx, c_i(k))`.
    pub fn map<F>(&self, hermitian: bool, f: F) -> Self
    where
        F: Fn(usize, usize, Complex64) -> Complex64 + Sync,
    {
        VectorField {
            comps: self
                .comps
                .iter()
                .enumerate()
                .map(|(i, c)| c.map(hermitian, |idx, z| f(i, idx, z)))
                .collect(),
        }
    }

    pub fn scale(&self, a: f64) -> Self {
        VectorField { comps: self.comps.iter().map(|c| c.scale(a)).collect() }
    }

    pub fn scale_complex(&self, a: Complex64) -> Self {
        VectorField { comps: self.comps.iter().map(|c| c.scale_complex(a)).collect() }
    }

    pub fn axpy(&mut self, a: Complex64, other: &VectorField) {
        assert_eq!(self.comps.len(), other.comps.len(), "dimension mismatch");
        for (x, y) in self.comps.iter_mut().zip(&other.comps) {
            x.axpy(a, y);
        }
    }

    pub fn dealiased(&self) -> Self {
        VectorField { comps: self.comps.iter().map(|c| c.dealiased()).collect() }
    }

    pub fn real_part(&self) -> Self {
        VectorField { comps: self.comps.iter().map(|c| c.real_part()).collect() }
    }

    pub fn energy(&self) -> f64 {
        self.comps.iter().map(|c| c.energy()).sum()
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.comps.iter().fold(0.0, |m, c| m.max(c.max_abs_coeff()))
    }

    pub fn hermitian_defect(&self) -> f64 {
        self.comps.iter().fold(0.0, |m, c| m.max(c.hermitian_defect()))
    }

    /// `max_k |k·û(k)| / max_k |û(k)|`.
    pub fn divergence_defect(&self) -> f64 {
        let grid = self.grid().clone();
        let scale = self.max_abs_coeff();
        if scale == 0.0 {
            return 0.0;
        }
        let d = (0..grid.len())
            .into_par_iter()
            .map(|idx| {
                let k = grid.wavevector(idx);
                let mut s = ZERO;
                for (a, c) in self.comps.iter().enumerate() {
                    s += c.coeffs[idx] * k[a];
                }
                s.norm()
            })
            .reduce(|| 0.0, f64::max);
        d / scale
    }

    pub fn is_divergence_free(&self) -> bool {
        self.divergence_defect() <= SOLENOIDAL_TOL
    }

    /// Physical samples of every component.
    pub fn to_samples(&self) -> Vec<Vec<f64>> {
        self.comps.iter().map(|c| c.to_samples()).collect()
    }
}

impl Add<&VectorField> for &VectorField {
    type Output = VectorField;
    fn add(self, rhs: &VectorField) -> VectorField {
        let mut out = self.clone();
        out.axpy(Complex64::new(1.0, 0.0), rhs);
        out
    }
}

impl Sub<&VectorField> for &VectorField {
    type Output = VectorField;
    fn sub(self, rhs: &VectorField) -> VectorField {
        let mut out = self.clone();
        out.axpy(Complex64::new(-1.0, 0.0), rhs);
        out
    }
}

impl Mul<f64> for &VectorField {
    type Output = VectorField;
    fn mul(self, a: f64) -> VectorField {
        self.scale(a)
    }
}

/// Anything made of spectral components on a common grid. Norms of vector
/// fields use the pointwise Euclidean magnitude.
pub trait Components {
    fn components(&self) -> &[SpectralField];

    fn grid(&self) -> &Grid {
        self.components()[0].grid()
    }
}

impl Components for SpectralField {
    fn components(&self) -> &[SpectralField] {
        std::slice::from_ref(self)
    }
}

impl Components for VectorField {
    fn components(&self) -> &[SpectralField] {
        &self.comps
    }
}

impl Components for [SpectralField] {
    fn components(&self) -> &[SpectralField] {
        self
    }
}

impl Components for Vec<SpectralField> {
    fn components(&self) -> &[SpectralField] {
        self
    }
}

/// Coefficient-wise maps shared by scalar and vector fields; vector fields
/// apply the map to every component.
pub trait ModeMap: Sized + Clone + Components {
    fn map_modes<F>(&self, hermitian: bool, f: F) -> Self
    where
        F: Fn(usize, Complex64) -> Complex64 + Sync;
}

impl ModeMap for SpectralField {
    fn map_modes<F>(&self, hermitian: bool, f: F) -> Self
    where
        F: Fn(usize, Complex64) -> Complex64 + Sync,
    {
        self.map(hermitian, f)
    }
}

impl ModeMap for VectorField {
    fn map_modes<F>(&self, hermitian: bool, f: F) -> Self
    where
        F: Fn(usize, Complex64) -> Complex64 + Sync,
    {
        self.map(hermitian, |_, idx, c| f(idx, c))
    }
}
