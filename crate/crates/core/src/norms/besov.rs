use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::lebesgue::{lp_of_samples, magnitude_of};
use super::partition::make_dyadic_partition;
use crate::error::{Error, Result};
use crate::field::{Components, SpectralField};

/// Smoothness `s`, integrability `p` and summation `q` of `Ḃ^s_{p,q}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BesovIndex {
    pub s: f64,
    pub p: f64,
    pub q: f64,
}

impl BesovIndex {
    pub fn new(s: f64, p: f64, q: f64) -> Result<Self> {
        if !(p >= 1.0) || !(q >= 1.0) {
            return Err(Error::ExponentOutOfRange(format!("p = {p}, q = {q} must lie in [1, inf]")));
        }
        if !s.is_finite() {
            return Err(Error::ExponentOutOfRange(format!("s = {s}")));
        }
        Ok(BesovIndex { s, p, q })
    }

    /// `Ḃ^{s(p)}_{p,q}` with `s(p) = −1 + n/p`.
    pub fn critical(n: usize, p: f64, q: f64) -> Result<Self> {
        BesovIndex::new(critical_s(n, p), p, q)
    }

    pub fn s_p(&self, n: usize) -> f64 {
        critical_s(n, self.p)
    }

    /// True iff `s < n/p`, or `s <= n/p` with `q = 1`.
    pub fn is_banach(&self, n: usize) -> bool {
        let np = n as f64 / self.p;
        self.s < np || (self.s <= np && self.q == 1.0)
    }

    pub fn with_s(&self, s: f64) -> Self {
        BesovIndex { s, ..*self }
    }
}

/// `s(p) = −1 + n/p`.
pub fn critical_s(n: usize, p: f64) -> f64 {
    -1.0 + n as f64 / p
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BlockNorm {
    pub j: i32,
    /// `‖φ_j(D) f‖_{L^p}`.
    pub lp: f64,
    /// `2^{js} ‖φ_j(D) f‖_{L^p}`.
    pub weighted: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NormReport {
    pub value: f64,
    pub per_block: Vec<BlockNorm>,
    pub warnings: Vec<String>,
}

/// `ℓ^q` aggregate of a sequence; `q = ∞` is the supremum.
pub fn lq_sum(values: impl IntoIterator<Item = f64>, q: f64) -> f64 {
    if q.is_infinite() {
        values.into_iter().fold(0.0, f64::max)
    } else if q == 1.0 {
        values.into_iter().sum()
    } else {
        values.into_iter().map(|v| v.powf(q)).sum::<f64>().powf(1.0 / q)
    }
}

/// Per-block `L^p` norms of every dyadic block; reusable across `s` and `q`.
#[derive(Clone, Debug)]
pub struct BlockNorms {
    pub j_min: i32,
    pub p: f64,
    pub lp: Vec<f64>,
}

impl BlockNorms {
    pub fn compute(f: &(impl Components + ?Sized), p: f64) -> Self {
        let comps = f.components();
        let grid = comps[0].grid();
        let part = make_dyadic_partition(grid);
        let js: Vec<i32> = part.range().collect();
        let lp = js
            .par_iter()
            .map(|&j| {
                let block = part.block(j);
                if block.is_empty() {
                    return 0.0;
                }
                if p == 2.0 {
                    let sum: f64 = comps
                        .iter()
                        .map(|c| {
                            let src = c.coeffs();
                            block.iter().map(|&(i, w)| (src[i as usize] * w).norm_sqr()).sum::<f64>()
                        })
                        .sum();
                    return (grid.volume() * sum).sqrt();
                }
                let samples: Vec<Vec<Complex64>> = comps
                    .iter()
                    .map(|c| part.apply(j, c).to_complex_samples())
                    .collect();
                lp_of_samples(&magnitude_of(&samples), p, grid.cell_volume())
            })
            .collect();
        BlockNorms { j_min: part.j_min, p, lp }
    }

    pub fn weighted(&self, s: f64) -> impl Iterator<Item = (i32, f64)> + '_ {
        self.lp
            .iter()
            .enumerate()
            .map(move |(i, &v)| {
                let j = self.j_min + i as i32;
                (j, (2.0f64).powf(j as f64 * s) * v)
            })
    }

    pub fn besov(&self, s: f64, q: f64) -> f64 {
        lq_sum(self.weighted(s).map(|(_, v)| v), q)
    }

    pub fn report(&self, idx: &BesovIndex, n: usize) -> NormReport {
        let per_block: Vec<BlockNorm> = self
            .weighted(idx.s)
            .zip(&self.lp)
            .map(|((j, weighted), &lp)| BlockNorm { j, lp, weighted })
            .collect();
        let value = lq_sum(per_block.iter().map(|b| b.weighted), idx.q);
        let mut warnings = Vec::new();
        if !idx.is_banach(n) {
            warnings.push(format!(
                "(s, p, q) = ({}, {}, {}) is outside the Banach range",
                idx.s, idx.p, idx.q
            ));
        }
        NormReport { value, per_block, warnings }
    }
}

/// `‖f‖_{Ḃ^s_{p,q}}` with per-block detail.
pub fn besov_norm(f: &(impl Components + ?Sized), idx: &BesovIndex) -> NormReport {
    let n = f.grid().dim();
    BlockNorms::compute(f, idx.p).report(idx, n)
}

/// Value-only shorthand for [`besov_norm`].
pub fn besov(f: &(impl Components + ?Sized), s: f64, p: f64, q: f64) -> f64 {
    BlockNorms::compute(f, p).besov(s, q)
}

/// Whether every coefficient outside block `j`'s closed annulus is zero.
pub fn block_support_ok(block: &SpectralField, j: i32) -> bool {
    let grid = block.grid();
    let lo = (2.0f64).powi(j - 1);
    let hi = (2.0f64).powi(j + 1);
    block.coeffs().iter().enumerate().all(|(i, c)| {
        let k = grid.k2(i).sqrt();
        (k >= lo && k <= hi) || *c == Complex64::new(0.0, 0.0)
    })
}
