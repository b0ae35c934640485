use num_complex::Complex64;
use rayon::prelude::*;

use crate::field::Components;

/// Pointwise Euclidean magnitude of the components on the sample grid.
pub fn magnitude_samples(f: &(impl Components + ?Sized)) -> Vec<f64> {
    let comps = f.components();
    let samples: Vec<Vec<Complex64>> = comps.iter().map(|c| c.to_complex_samples()).collect();
    magnitude_of(&samples)
}

pub(crate) fn magnitude_of(samples: &[Vec<Complex64>]) -> Vec<f64> {
    let len = samples[0].len();
    (0..len)
        .into_par_iter()
        .map(|i| samples.iter().map(|s| s[i].norm_sqr()).sum::<f64>().sqrt())
        .collect()
}

/// `(Σ |f|^p dV)^(1/p)` on samples; `p = ∞` gives the maximum.
pub fn lp_of_samples(mag: &[f64], p: f64, cell: f64) -> f64 {
    if p.is_infinite() {
        return mag.iter().fold(0.0, |m, &x| m.max(x));
    }
    let scale = mag.iter().fold(0.0, |m: f64, &x| m.max(x));
    if scale == 0.0 {
        return 0.0;
    }
    // Scaled to avoid overflow for large p.
    let sum: f64 = mag.par_iter().map(|&x| (x / scale).powf(p)).sum();
    scale * (sum * cell).powf(1.0 / p)
}

/// Sorted-rearrangement weak norm `max_k a_(k) (k dV)^(1/p)`.
pub fn weak_lp_of_samples(mag: &[f64], p: f64, cell: f64) -> f64 {
    if p.is_infinite() {
        return lp_of_samples(mag, p, cell);
    }
    let mut sorted = mag.to_vec();
    sorted.par_sort_unstable_by(|a, b| b.total_cmp(a));
    sorted
        .iter()
        .enumerate()
        .map(|(i, &a)| a * ((i + 1) as f64 * cell).powf(1.0 / p))
        .fold(0.0, f64::max)
}

/// Grid quadrature of `‖f‖_{L^p}`.
pub fn lp_norm(f: &(impl Components + ?Sized), p: f64) -> f64 {
    assert!(p >= 1.0, "p must be >= 1");
    let cell = f.grid().cell_volume();
    lp_of_samples(&magnitude_samples(f), p, cell)
}

/// Weak-`L^p` quasinorm from the sorted rearrangement of grid samples.
pub fn weak_lp_norm(f: &(impl Components + ?Sized), p: f64) -> f64 {
    assert!(p >= 1.0, "p must be >= 1");
    let cell = f.grid().cell_volume();
    weak_lp_of_samples(&magnitude_samples(f), p, cell)
}
