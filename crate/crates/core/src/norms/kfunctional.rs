use super::lebesgue::lp_norm;
use super::partition::make_dyadic_partition;
use crate::error::{Error, Result};
use crate::field::{Components, SpectralField};

/// Norm table of all frequency-threshold splits `f = P_{<J} f + P_{>=J} f`,
/// from which `K(λ, f; L^{p0}, L^{p1})` is bounded above for any `λ`.
#[derive(Clone, Debug)]
pub struct KFunctional {
    pub p0: f64,
    pub p1: f64,
    /// `(‖low‖_{p0}, ‖low‖_{p1}, ‖high‖_{p0}, ‖high‖_{p1})` per threshold.
    splits: Vec<[f64; 4]>,
}

impl KFunctional {
    pub fn new(f: &(impl Components + ?Sized), p0: f64, p1: f64) -> Result<Self> {
        if !(p0 > 1.0 && p1 > p0) {
            return Err(Error::ExponentOutOfRange(format!("need 1 < p0 < p1, got p0 = {p0}, p1 = {p1}")));
        }
        let comps = f.components();
        let part = make_dyadic_partition(comps[0].grid());
        let mut splits = Vec::new();
        for jt in part.j_min..=part.j_max + 1 {
            let (low, high): (Vec<SpectralField>, Vec<SpectralField>) = comps
                .iter()
                .map(|c| {
                    let mut low = SpectralField::zeros(c.grid());
                    for j in part.j_min..jt {
                        let dst = low.coeffs_mut();
                        for &(i, w) in part.block(j) {
                            dst[i as usize] += c.coeffs()[i as usize] * w;
                        }
                    }
                    low.set_real(c.is_real());
                    let high = c - &low;
                    (low, high)
                })
                .unzip();
            splits.push([lp_norm(&low, p0), lp_norm(&low, p1), lp_norm(&high, p0), lp_norm(&high, p1)]);
        }
        Ok(KFunctional { p0, p1, splits })
    }

    /// Minimum of `‖f0‖_{p0} + λ‖f1‖_{p1}` over both assignments of every split.
    pub fn eval(&self, lambda: f64) -> f64 {
        self.splits
            .iter()
            .map(|&[l0, l1, h0, h1]| (h0 + lambda * l1).min(l0 + lambda * h1))
            .fold(f64::INFINITY, f64::min)
    }
}

/// Upper bound on `K(λ, f; L^{p0}, L^{p1})` by frequency-threshold splitting.
pub fn k_functional(f: &(impl Components + ?Sized), lambda: f64, p0: f64, p1: f64) -> Result<f64> {
    if !(lambda > 0.0) {
        return Err(Error::InvalidArgument(format!("lambda must be positive, got {lambda}")));
    }
    Ok(KFunctional::new(f, p0, p1)?.eval(lambda))
}
