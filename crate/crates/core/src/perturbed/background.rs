use crate::error::{Error, Result};
use crate::field::VectorField;
use crate::grid::Grid;
use crate::norms::weak_lp_norm;

/// Stationary background flow `U` with cached `‖U‖_{L^{n,∞}}` and its
/// dealiased physical samples.
#[derive(Clone, Debug)]
pub struct Background {
    u: VectorField,
    samples: Vec<Vec<f64>>,
    weak_ln_norm: f64,
    zero: bool,
}

impl Background {
    pub fn new(u: VectorField) -> Result<Self> {
        if !u.is_real() {
            return Err(Error::InvalidArgument("background must be a real field".into()));
        }
        let defect = u.divergence_defect();
        if defect > crate::field::SOLENOIDAL_TOL {
            return Err(Error::NotSolenoidal(defect));
        }
        let zero = u.max_abs_coeff() == 0.0;
        let weak_ln_norm = if zero { 0.0 } else { weak_lp_norm(&u, u.dim() as f64) };
        let samples = u.dealiased().to_samples();
        Ok(Background { u, samples, weak_ln_norm, zero })
    }

    pub fn zero(grid: &Grid) -> Self {
        Background::new(VectorField::zeros(grid)).expect("zero field is admissible")
    }

    pub fn u(&self) -> &VectorField {
        &self.u
    }

    pub fn grid(&self) -> &Grid {
        self.u.grid()
    }

    pub fn weak_ln_norm(&self) -> f64 {
        self.weak_ln_norm
    }

    pub fn is_zero(&self) -> bool {
        self.zero
    }

    pub(crate) fn samples(&self) -> &[Vec<f64>] {
        &self.samples
    }
}
