use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::besov::besov;
use super::lebesgue::weak_lp_norm;
use crate::error::{Error, Result};
use crate::field::{pointwise_product, SpectralField};
use crate::grid::Grid;
use crate::random::{random_scalar_field, SpectrumProfile};
use crate::stats::RatioStats;

/// Random ensemble recipe: member `i` uses seed `seed + i`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSpec {
    pub size: usize,
    pub alpha: f64,
    pub k_cut: f64,
    pub seed: u64,
}

impl EnsembleSpec {
    pub fn profile(&self, i: u64) -> SpectrumProfile {
        SpectrumProfile::new(self.alpha, self.k_cut, self.seed.wrapping_add(i))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct EmbeddingReport {
    pub ell: f64,
    /// `(‖f‖_{L^{ℓ,∞}}, ‖f‖_{Ḃ^s_{p,∞}})` per member.
    pub pairs: Vec<(f64, f64)>,
    pub ratios: Vec<f64>,
    pub stats: RatioStats,
}

/// `ℓ = np / (n − sp)`.
pub fn embedding_exponent(n: usize, p: f64, s: f64) -> f64 {
    n as f64 * p / (n as f64 - s * p)
}

/// Ratios `‖f‖_{L^{ℓ,∞}} / ‖f‖_{Ḃ^s_{p,∞}}` over a scalar ensemble.
pub fn verify_embedding(grid: &Grid, ens: &EnsembleSpec, s: f64, p: f64) -> Result<EmbeddingReport> {
    let n = grid.dim() as f64;
    if !(p > 1.0 && p.is_finite()) || !(s > 0.0 && s < n / p) {
        return Err(Error::ExponentOutOfRange(format!("need 1 < p < inf and 0 < s < n/p, got p = {p}, s = {s}")));
    }
    let ell = embedding_exponent(grid.dim(), p, s);
    let pairs = (0..ens.size as u64)
        .into_par_iter()
        .map(|i| {
            let f = random_scalar_field(grid, &ens.profile(i))?;
            Ok((weak_lp_norm(&f, ell), besov(&f, s, p, f64::INFINITY)))
        })
        .collect::<Result<Vec<(f64, f64)>>>()?;
    let ratios: Vec<f64> = pairs.iter().map(|&(a, b)| if b > 0.0 { a / b } else { f64::NAN }).collect();
    let stats = RatioStats::from_ratios(&ratios)?;
    Ok(EmbeddingReport { ell, pairs, ratios, stats })
}

#[derive(Clone, Debug, Serialize)]
pub struct ProductReport {
    /// `(‖gh‖_{Ḃ^{s−1}_{p,∞}}, ‖g‖_{L^{n,∞}} ‖h‖_{Ḃ^s_{p,∞}})` per pair.
    pub pairs: Vec<(f64, f64)>,
    pub ratios: Vec<f64>,
    pub stats: RatioStats,
}

/// Ratios `‖gh‖_{Ḃ^{s−1}_{p,∞}} / (‖g‖_{L^{n,∞}} ‖h‖_{Ḃ^s_{p,∞}})` over random pairs;
/// pair `i` uses seeds `seed + 2i` and `seed + 2i + 1`.
pub fn verify_product(grid: &Grid, ens: &EnsembleSpec, p: f64, s: f64) -> Result<ProductReport> {
    let n = grid.dim() as f64;
    if grid.dim() < 3 || !(p > n / 2.0 && p < n) || !(s > 0.0 && s < 1.0) {
        return Err(Error::ExponentOutOfRange(format!(
            "need n >= 3, n/2 < p < n, 0 < s < 1; got n = {n}, p = {p}, s = {s}"
        )));
    }
    let pairs = (0..ens.size as u64)
        .into_par_iter()
        .map(|i| {
            let g = random_scalar_field(grid, &ens.profile(2 * i))?;
            let h = random_scalar_field(grid, &ens.profile(2 * i + 1))?;
            product_terms(&g, &h, p, s)
        })
        .collect::<Result<Vec<(f64, f64)>>>()?;
    let ratios: Vec<f64> = pairs.iter().map(|&(a, b)| if b > 0.0 { a / b } else { f64::NAN }).collect();
    let stats = RatioStats::from_ratios(&ratios)?;
    Ok(ProductReport { pairs, ratios, stats })
}

fn product_terms(g: &SpectralField, h: &SpectralField, p: f64, s: f64) -> Result<(f64, f64)> {
    let n = g.grid().dim() as f64;
    let den = weak_lp_norm(g, n) * besov(h, s, p, f64::INFINITY);
    if den == 0.0 {
        return Ok((0.0, 0.0));
    }
    let gh = pointwise_product(g, h)?;
    Ok((besov(&gh, s - 1.0, p, f64::INFINITY), den))
}

/// Single-pair product ratio; NaN when either factor vanishes.
pub fn product_ratio(g: &SpectralField, h: &SpectralField, p: f64, s: f64) -> Result<f64> {
    let (num, den) = product_terms(g, h, p, s)?;
    Ok(if den > 0.0 { num / den } else { f64::NAN })
}
