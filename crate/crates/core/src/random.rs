//! Seeded random fields with power-law spectra.
//!
//! Coefficients are drawn in a canonical order over integer wavenumbers, so
//! the same seed and profile give the same field on every resolution that
//! resolves the band `|k| <= k_cut`.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{SpectralField, VectorField};
use crate::grid::Grid;
use crate::multipliers::leray_project;

/// Amplitude `|k|^alpha` for `0 < |k| <= k_cut`, zero above.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumProfile {
    pub alpha: f64,
    pub k_cut: f64,
    pub seed: u64,
}

impl SpectrumProfile {
    pub fn new(alpha: f64, k_cut: f64, seed: u64) -> Self {
        SpectrumProfile { alpha, k_cut, seed }
    }

    pub fn validate(&self, grid: &Grid) -> Result<()> {
        let n = grid.dim() as f64;
        if !self.alpha.is_finite() {
            return Err(Error::InvalidProfile(format!("alpha = {} must be finite", self.alpha)));
        }
        if self.alpha <= -n / 2.0 {
            // Fine on the torus (the lowest shell is k_min > 0), but the
            // continuum limit of such a field is not locally square integrable.
            log::warn!("alpha = {} <= -n/2: profile is infrared singular in the continuum", self.alpha);
        }
        if !(self.k_cut > 0.0) || self.k_cut > grid.k_axis_cut() * (1.0 + 1e-12) {
            return Err(Error::InvalidProfile(format!(
                "k_cut = {} must lie in (0, pi N / L = {}]",
                self.k_cut,
                grid.k_axis_cut()
            )));
        }
        if self.k_cut < grid.k_min() {
            return Err(Error::InvalidProfile(format!(
                "k_cut = {} is below the lattice spacing {}",
                self.k_cut,
                grid.k_min()
            )));
        }
        Ok(())
    }
}

fn first_nonzero_positive(m: &[i32]) -> bool {
    m.iter().find(|&&x| x != 0).is_some_and(|&x| x > 0)
}

fn draw(grid: &Grid, profile: &SpectrumProfile, ncomp: usize) -> Result<Vec<SpectralField>> {
    profile.validate(grid)?;
    let n = grid.dim();
    let dk = grid.k_min();
    let half = (grid.points() / 2) as i32;
    let mc = ((profile.k_cut / dk + 1e-9).floor() as i32).min(half - 1);
    let mut coeffs = vec![vec![Complex64::new(0.0, 0.0); grid.len()]; ncomp];
    let mut rng = ChaCha8Rng::seed_from_u64(profile.seed);
    let side = (2 * mc + 1) as usize;
    let total = side.pow(n as u32);
    let mut m = vec![0i32; n];
    for flat in 0..total {
        let mut rem = flat;
        for a in (0..n).rev() {
            m[a] = (rem % side) as i32 - mc;
            rem /= side;
        }
        if !first_nonzero_positive(&m) {
            continue;
        }
        let kk = dk * (m.iter().map(|&x| (x * x) as f64).sum::<f64>()).sqrt();
        if kk > profile.k_cut * (1.0 + 1e-12) {
            continue;
        }
        let amp = kk.powf(profile.alpha) / std::f64::consts::SQRT_2;
        let idx = grid.index_of(&m).expect("mode inside band");
        let nidx = grid.neg_index(idx);
        for comp in coeffs.iter_mut() {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            let z = Complex64::new(re, im) * amp;
            comp[idx] = z;
            comp[nidx] = z.conj();
        }
    }
    coeffs.into_iter().map(|c| SpectralField::from_coeffs(grid, c, true)).collect()
}

/// Real scalar field with the given spectrum.
pub fn random_scalar_field(grid: &Grid, profile: &SpectrumProfile) -> Result<SpectralField> {
    Ok(draw(grid, profile, 1)?.pop().expect("one component"))
}

/// Real vector field with the given spectrum; Leray-projected if `solenoidal`.
pub fn random_field(grid: &Grid, profile: &SpectrumProfile, solenoidal: bool) -> Result<VectorField> {
    let v = VectorField::new(draw(grid, profile, grid.dim())?)?;
    Ok(if solenoidal { leray_project(&v) } else { v })
}
