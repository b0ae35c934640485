use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

/// Separable n-dimensional FFT on an `N^n` row-major array.
///
/// Each pass transforms the contiguous last axis and then rotates the axes
/// with `out[c*M + r] = in[r*N + c]`, `M = N^(n-1)`; after `n` passes the
/// original layout is restored. Unnormalized in both directions.
pub(crate) struct FftNd {
    dim: usize,
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for FftNd {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FftNd").field("dim", &self.dim).field("n", &self.n).finish()
    }
}

const ROWS_PER_TASK: usize = 64;

impl FftNd {
    pub(crate) fn new(dim: usize, n: usize) -> Self {
        let mut planner = FftPlanner::new();
        FftNd {
            dim,
            n,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        }
    }

    pub(crate) fn forward(&self, data: &mut Vec<Complex64>) {
        self.run(data, &self.forward);
    }

    pub(crate) fn inverse(&self, data: &mut Vec<Complex64>) {
        self.run(data, &self.inverse);
    }

    fn run(&self, data: &mut Vec<Complex64>, fft: &Arc<dyn Fft<f64>>) {
        let n = self.n;
        let len = data.len();
        debug_assert_eq!(len, n.pow(self.dim as u32));
        let m = len / n;
        let mut buf = vec![Complex64::new(0.0, 0.0); len];
        let scratch_len = fft.get_inplace_scratch_len();
        for _ in 0..self.dim {
            data.par_chunks_mut(n * ROWS_PER_TASK).for_each(|chunk| {
                let mut scratch = vec![Complex64::new(0.0, 0.0); scratch_len];
                fft.process_with_scratch(chunk, &mut scratch);
            });
            {
                let src: &[Complex64] = data;
                buf.par_chunks_mut(m).enumerate().for_each(|(c, out)| {
                    for (r, o) in out.iter_mut().enumerate() {
                        *o = src[r * n + c];
                    }
                });
            }
            std::mem::swap(data, &mut buf);
        }
    }
}
