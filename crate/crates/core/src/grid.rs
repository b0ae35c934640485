//! Periodic grid `[0, L)^n` with `N` points per axis and its wavevector table.

use std::f64::consts::PI;
use std::sync::{Arc, OnceLock};

use crate::error::{Error, Result};
use crate::fft::FftNd;
use crate::norms::Partition;

/// Shared, cheaply clonable grid descriptor.
///
/// Flat indices are row-major over `(i_1, ..., i_n)` in FFT order: per axis,
/// index `i <= N/2` carries integer wavenumber `m = i`, otherwise `m = i - N`.
/// The Nyquist plane therefore has `m = +N/2`.
#[derive(Clone)]
pub struct Grid(Arc<Inner>);

struct Inner {
    dim: usize,
    points: usize,
    length: f64,
    len: usize,
    modes: Vec<[i32; 3]>,
    kvec: Vec<[f64; 3]>,
    k2: Vec<f64>,
    neg: Vec<u32>,
    keep: Vec<bool>,
    fft: FftNd,
    partition: OnceLock<Partition>,
}

impl std::fmt::Debug for Grid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Grid")
            .field("dim", &self.0.dim)
            .field("points", &self.0.points)
            .field("length", &self.0.length)
            .finish()
    }
}

impl PartialEq for Grid {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.dim == other.0.dim
                && self.0.points == other.0.points
                && self.0.length == other.0.length)
    }
}

fn axis_mode(i: usize, n: usize) -> i32 {
    if i <= n / 2 {
        i as i32
    } else {
        i as i32 - n as i32
    }
}

fn axis_index(m: i32, n: usize) -> usize {
    (m.rem_euclid(n as i32)) as usize
}

impl Grid {
    pub fn new(dim: usize, points: usize, length: f64) -> Result<Grid> {
        if dim != 2 && dim != 3 {
            return Err(Error::InvalidDimension(dim));
        }
        if points < 8 || !points.is_power_of_two() {
            return Err(Error::NonPowerOfTwo(points));
        }
        if !(length > 0.0 && length.is_finite()) {
            return Err(Error::InvalidLength(length));
        }
        if dim == 2 {
            log::warn!("two-dimensional grid: spaces with s(p) = 0 at p = 2 are outside the banach range");
        }
        let len = points.pow(dim as u32);
        let dk = 2.0 * PI / length;
        let mut modes = Vec::with_capacity(len);
        let mut kvec = Vec::with_capacity(len);
        let mut k2 = Vec::with_capacity(len);
        let mut neg = Vec::with_capacity(len);
        let mut keep = Vec::with_capacity(len);
        for idx in 0..len {
            let mut m = [0i32; 3];
            let mut rem = idx;
            for a in (0..dim).rev() {
                m[a] = axis_mode(rem % points, points);
                rem /= points;
            }
            let k = [dk * m[0] as f64, dk * m[1] as f64, dk * m[2] as f64];
            let mut nidx = 0usize;
            for &ma in m.iter().take(dim) {
                nidx = nidx * points + axis_index(-ma, points);
            }
            modes.push(m);
            kvec.push(k);
            k2.push(k[0] * k[0] + k[1] * k[1] + k[2] * k[2]);
            neg.push(nidx as u32);
            keep.push(m.iter().all(|&ma| 3 * ma.unsigned_abs() as usize <= points));
        }
        Ok(Grid(Arc::new(Inner {
            dim,
            points,
            length,
            len,
            modes,
            kvec,
            k2,
            neg,
            keep,
            fft: FftNd::new(dim, points),
            partition: OnceLock::new(),
        })))
    }

    pub fn dim(&self) -> usize {
        self.0.dim
    }

    pub fn points(&self) -> usize {
        self.0.points
    }

    pub fn length(&self) -> f64 {
        self.0.length
    }

    /// Number of grid points `N^n`.
    pub fn len(&self) -> usize {
        self.0.len
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// `(L/N)^n`.
    pub fn cell_volume(&self) -> f64 {
        (self.0.length / self.0.points as f64).powi(self.0.dim as i32)
    }

    /// `L^n`.
    pub fn volume(&self) -> f64 {
        self.0.length.powi(self.0.dim as i32)
    }

    /// Lattice spacing `2π/L`.
    pub fn k_min(&self) -> f64 {
        2.0 * PI / self.0.length
    }

    /// Largest `|k|` on the grid (cube corner).
    pub fn k_max(&self) -> f64 {
        self.k_min() * (self.0.points / 2) as f64 * (self.0.dim as f64).sqrt()
    }

    /// Largest `|k|` that survives dealiasing.
    pub fn k_max_dealiased(&self) -> f64 {
        self.k_min() * (self.0.points / 3) as f64 * (self.0.dim as f64).sqrt()
    }

    /// Per-axis cutoff `πN/L`.
    pub fn k_axis_cut(&self) -> f64 {
        PI * self.0.points as f64 / self.0.length
    }

    pub fn mode(&self, idx: usize) -> [i32; 3] {
        self.0.modes[idx]
    }

    pub fn wavevector(&self, idx: usize) -> [f64; 3] {
        self.0.kvec[idx]
    }

    pub fn wavevectors(&self) -> &[[f64; 3]] {
        &self.0.kvec
    }

    pub fn k2(&self, idx: usize) -> f64 {
        self.0.k2[idx]
    }

    pub fn k2_all(&self) -> &[f64] {
        &self.0.k2
    }

    /// Flat index of `-m`.
    pub fn neg_index(&self, idx: usize) -> usize {
        self.0.neg[idx] as usize
    }

    /// Two-thirds rule mask: `3|m_i| <= N` on every axis.
    pub fn keep(&self, idx: usize) -> bool {
        self.0.keep[idx]
    }

    pub fn keep_mask(&self) -> &[bool] {
        &self.0.keep
    }

    /// True if any axis sits on the Nyquist plane `m_i = N/2`.
    pub fn is_nyquist(&self, idx: usize) -> bool {
        let half = (self.0.points / 2) as i32;
        self.0.modes[idx][..self.0.dim].contains(&half)
    }

    /// Flat index of integer wavenumber `m`, or `None` if it does not fit.
    pub fn index_of(&self, m: &[i32]) -> Option<usize> {
        if m.len() != self.0.dim {
            return None;
        }
        let n = self.0.points as i32;
        let mut idx = 0usize;
        for &ma in m {
            if ma <= -n / 2 || ma > n / 2 {
                return None;
            }
            idx = idx * self.0.points + axis_index(ma, self.0.points);
        }
        Some(idx)
    }

    /// Physical coordinate of flat sample index `idx`.
    pub fn position(&self, idx: usize) -> [f64; 3] {
        let h = self.0.length / self.0.points as f64;
        let mut x = [0.0; 3];
        let mut rem = idx;
        for a in (0..self.0.dim).rev() {
            x[a] = h * (rem % self.0.points) as f64;
            rem /= self.0.points;
        }
        x
    }

    pub(crate) fn fft(&self) -> &FftNd {
        &self.0.fft
    }

    pub(crate) fn partition_cell(&self) -> &OnceLock<Partition> {
        &self.0.partition
    }

    pub fn same_as(&self, other: &Grid) -> bool {
        self == other
    }
}
