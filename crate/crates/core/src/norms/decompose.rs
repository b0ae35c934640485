use super::partition::make_dyadic_partition;
use crate::field::SpectralField;

/// Littlewood–Paley blocks `φ_j(D) f` for `j` in `j_min..=j_max`.
#[derive(Clone, Debug)]
pub struct DyadicDecomposition {
    pub j_min: i32,
    pub j_max: i32,
    pub blocks: Vec<SpectralField>,
}

impl DyadicDecomposition {
    pub fn block(&self, j: i32) -> Option<&SpectralField> {
        if j < self.j_min || j > self.j_max {
            return None;
        }
        self.blocks.get((j - self.j_min) as usize)
    }

    /// `Σ_j φ_j(D) f`.
    pub fn reconstruct(&self) -> SpectralField {
        let mut out = SpectralField::zeros(self.blocks[0].grid());
        let real = self.blocks.iter().all(|b| b.is_real());
        for b in &self.blocks {
            for (o, c) in out.coeffs_mut().iter_mut().zip(b.coeffs()) {
                *o += c;
            }
        }
        out.set_real(real);
        out
    }
}

pub fn dyadic_decompose(f: &SpectralField) -> DyadicDecomposition {
    let part = make_dyadic_partition(f.grid());
    DyadicDecomposition {
        j_min: part.j_min,
        j_max: part.j_max,
        blocks: part.range().map(|j| part.apply(j, f)).collect(),
    }
}
