use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::norms::critical_s;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub n: usize,
    pub points: usize,
    pub length: f64,
}

impl GridConfig {
    pub fn build(&self) -> Result<Grid> {
        Grid::new(self.n, self.points, self.length)
    }
}

/// Spectral recipe for a random solenoidal field, rescaled to `amplitude`
/// in the norm named by the caller.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldRecipe {
    pub amplitude: f64,
    /// Spectral exponent; `None` selects the documented default.
    #[serde(default)]
    pub alpha: Option<f64>,
    pub k_cut: f64,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WindowConfig {
    pub t_min: f64,
    pub t_max: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverMethod {
    Direct,
    Picard,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default)]
    pub csv: Option<PathBuf>,
    #[serde(default)]
    pub summary: Option<PathBuf>,
}

/// Parameters of one stability run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub grid: GridConfig,
    pub p: f64,
    pub s: f64,
    pub tau_h: f64,
    pub tau_l: f64,
    /// Forcing, scaled to `‖f‖_{Ḃ^{s(p)−2}_{p,∞}} = amplitude`.
    pub forcing: FieldRecipe,
    /// Initial perturbation `b = a − U`, scaled to `‖b‖_{Ḃ^{s(p)}_{p,∞}} = amplitude`.
    pub perturbation: FieldRecipe,
    pub window: WindowConfig,
    pub method: SolverMethod,
    pub dt: f64,
    #[serde(default)]
    pub output: OutputConfig,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(text).map_err(|e| Error::InvalidConfig(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn s_p(&self) -> f64 {
        critical_s(self.grid.n, self.p)
    }

    /// `γ = s(p) − τ_L − s`, always recomputed from the exponents.
    pub fn gamma(&self) -> f64 {
        self.s_p() - self.tau_l - self.s
    }

    /// `α_b = −n/2 − s(p) + τ_L` unless overridden.
    pub fn perturbation_alpha(&self) -> f64 {
        self.perturbation.alpha.unwrap_or(-(self.grid.n as f64) / 2.0 - self.s_p() + self.tau_l)
    }

    /// `α_f = −n/2 − s(p) + 2`, the flat profile in `Ḃ^{s(p)−2}_{p,∞}`, unless overridden.
    pub fn forcing_alpha(&self) -> f64 {
        self.forcing.alpha.unwrap_or(-(self.grid.n as f64) / 2.0 - self.s_p() + 2.0)
    }

    pub fn validate(&self) -> Result<()> {
        let grid = self.grid.build()?;
        let n = self.grid.n as f64;
        let sp = self.s_p();
        if !(self.p > n / 2.0 && self.p < n) {
            return Err(Error::InvalidConfig(format!("p = {} must lie in (n/2, n)", self.p)));
        }
        if !(self.tau_h > 0.0 && self.tau_h < 2.0 - n / self.p) {
            return Err(Error::InvalidConfig(format!("tau_h = {} must lie in (0, 2 - n/p = {})", self.tau_h, 2.0 - n / self.p)));
        }
        if !(self.s > 0.0 && self.s < sp) {
            return Err(Error::InvalidConfig(format!("s = {} must lie in (0, s(p) = {sp})", self.s)));
        }
        if !(self.tau_l > 0.0 && self.tau_l <= sp - self.s + 1e-12) {
            return Err(Error::InvalidConfig(format!("tau_l = {} must lie in (0, s(p) - s = {}]", self.tau_l, sp - self.s)));
        }
        let hi = crate::perturbed::box_window_max(&grid);
        if !(self.window.t_min > 0.0 && self.window.t_min < self.window.t_max) {
            return Err(Error::InvalidConfig("window needs 0 < t_min < t_max".into()));
        }
        if self.window.t_max > hi * (1.0 + 1e-12) {
            return Err(Error::WindowViolation(format!("t_max = {} exceeds 0.1 (L/2pi)^2 = {hi}", self.window.t_max)));
        }
        if !(self.dt > 0.0) {
            return Err(Error::InvalidConfig(format!("dt = {} must be positive", self.dt)));
        }
        for (name, r) in [("forcing", &self.forcing), ("perturbation", &self.perturbation)] {
            if !(r.amplitude >= 0.0 && r.amplitude.is_finite()) {
                return Err(Error::InvalidConfig(format!("{name} amplitude must be finite and >= 0")));
            }
        }
        Ok(())
    }
}
