use crate::field::SpectralField;
use crate::grid::Grid;

fn g(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        (-1.0 / x).exp()
    }
}

/// Smooth cutoff: 1 on `[0, 1]`, 0 on `[2, ∞)`, monotone and C^∞ between.
pub fn chi(r: f64) -> f64 {
    if r <= 1.0 {
        1.0
    } else if r >= 2.0 {
        0.0
    } else {
        let a = g(2.0 - r);
        let b = g(r - 1.0);
        a / (a + b)
    }
}

/// `φ_j(ξ) = χ(|ξ|/2^j) − χ(|ξ|/2^(j−1))`, supported in `2^(j−1) <= |ξ| <= 2^(j+1)`.
pub fn phi(j: i32, k_abs: f64) -> f64 {
    let s = (2.0f64).powi(j);
    chi(k_abs / s) - chi(2.0 * k_abs / s)
}

/// Sparse Littlewood–Paley partition of a grid: for each `j`, the flat
/// indices with nonzero weight and the weight `φ_j(k)`.
#[derive(Debug)]
pub struct Partition {
    pub j_min: i32,
    pub j_max: i32,
    blocks: Vec<Vec<(u32, f64)>>,
}

impl Partition {
    fn build(grid: &Grid) -> Partition {
        // Every j whose closed annulus meets the nonzero wavenumbers.
        let j_min = grid.k_min().log2().ceil() as i32 - 1;
        let j_max = grid.k_max().log2().floor() as i32 + 1;
        let mut blocks = vec![Vec::new(); (j_max - j_min + 1) as usize];
        for idx in 1..grid.len() {
            let k = grid.k2(idx).sqrt();
            let jc = k.log2().floor() as i32;
            for j in (jc - 1)..=(jc + 1) {
                if j < j_min || j > j_max {
                    continue;
                }
                let w = phi(j, k);
                if w != 0.0 {
                    blocks[(j - j_min) as usize].push((idx as u32, w));
                }
            }
        }
        Partition { j_min, j_max, blocks }
    }

    pub fn range(&self) -> std::ops::RangeInclusive<i32> {
        self.j_min..=self.j_max
    }

    /// Sparse `(index, φ_j(k))` list of block `j` (empty outside the range).
    pub fn block(&self, j: i32) -> &[(u32, f64)] {
        if j < self.j_min || j > self.j_max {
            return &[];
        }
        &self.blocks[(j - self.j_min) as usize]
    }

    /// `φ_j(D) f` for a single component.
    pub fn apply(&self, j: i32, f: &SpectralField) -> SpectralField {
        let mut out = SpectralField::zeros(f.grid());
        let src = f.coeffs();
        let dst = out.coeffs_mut();
        for &(idx, w) in self.block(j) {
            dst[idx as usize] = src[idx as usize] * w;
        }
        out.set_real(f.is_real());
        out
    }
}

/// Cached partition of unity for `grid`.
pub fn make_dyadic_partition(grid: &Grid) -> &Partition {
    grid.partition_cell().get_or_init(|| Partition::build(grid))
}
