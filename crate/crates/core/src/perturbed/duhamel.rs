use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::timestep::Propagator;
use crate::error::{Error, Result};
use crate::field::VectorField;
use crate::quadrature::{graded_panels, GaussLegendre};

/// Time-dependent source `σ ↦ S(σ)` of a Duhamel integral.
pub trait SourcePath: Sync {
    fn eval(&self, sigma: f64) -> Result<VectorField>;
}

impl<F> SourcePath for F
where
    F: Fn(f64) -> Result<VectorField> + Sync,
{
    fn eval(&self, sigma: f64) -> Result<VectorField> {
        self(sigma)
    }
}

/// Time-independent source.
#[derive(Clone, Debug)]
pub struct ConstantSource(pub VectorField);

impl SourcePath for ConstantSource {
    fn eval(&self, _sigma: f64) -> Result<VectorField> {
        Ok(self.0.clone())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DuhamelConfig {
    pub nodes_per_panel: usize,
    /// Panel halvings toward `σ = t`; `None` picks them from the grid's stiffness.
    pub levels: Option<usize>,
    pub tol: f64,
    pub max_refinements: usize,
}

impl Default for DuhamelConfig {
    fn default() -> Self {
        DuhamelConfig { nodes_per_panel: 8, levels: None, tol: 1e-5, max_refinements: 3 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DuhamelReport {
    pub levels: usize,
    pub nodes_per_panel: usize,
    pub rel_change: f64,
}

fn quadrature(
    source: &dyn SourcePath,
    t: f64,
    panels: &[(f64, f64)],
    rule: &GaussLegendre,
    prop: &dyn Propagator,
    template: &VectorField,
) -> Result<VectorField> {
    let nodes: Vec<(f64, f64)> = panels.iter().flat_map(|&(a, b)| rule.mapped(a, b).collect::<Vec<_>>()).collect();
    let mut acc = VectorField::zeros(template.grid());
    let chunk = rayon::current_num_threads().max(1);
    for group in nodes.chunks(chunk) {
        let terms = group
            .par_iter()
            .map(|&(sigma, w)| Ok((w, prop.propagate(&source.eval(sigma)?, t - sigma)?)))
            .collect::<Result<Vec<_>>>()?;
        for (w, v) in terms {
            acc.axpy(Complex64::new(w, 0.0), &v);
        }
    }
    Ok(acc)
}

/// `∫_{t0}^{t} e^{−(t−σ)A} S(σ) dσ` by composite Gauss–Legendre on panels
/// graded by ratio 2 toward `σ = t`, accepted when doubling the nodes per
/// panel changes the result by less than `cfg.tol` (relative, `L^2`).
pub fn duhamel(
    source: &dyn SourcePath,
    t0: f64,
    t: f64,
    prop: &dyn Propagator,
    cfg: &DuhamelConfig,
) -> Result<(VectorField, DuhamelReport)> {
    if !(t > t0 && t0 >= 0.0) {
        return Err(Error::InvalidArgument(format!("need t > t0 >= 0, got t0 = {t0}, t = {t}")));
    }
    let grid = prop.background().grid().clone();
    let stiff = grid.k_max_dealiased().powi(2);
    let mut levels = cfg
        .levels
        .unwrap_or_else(|| ((t - t0) * stiff).log2().ceil().clamp(0.0, 40.0) as usize);
    let template = VectorField::zeros(&grid);
    let mut last_change = f64::INFINITY;
    for _ in 0..=cfg.max_refinements {
        let panels = graded_panels(t0, t, levels);
        let coarse = quadrature(source, t, &panels, &GaussLegendre::new(cfg.nodes_per_panel), prop, &template)?;
        let fine = quadrature(source, t, &panels, &GaussLegendre::new(2 * cfg.nodes_per_panel), prop, &template)?;
        let scale = fine.energy().sqrt();
        let change = if scale > 0.0 { (&fine - &coarse).energy().sqrt() / scale } else { 0.0 };
        last_change = change;
        if change < cfg.tol {
            let report = DuhamelReport { levels, nodes_per_panel: 2 * cfg.nodes_per_panel, rel_change: change };
            return Ok((fine, report));
        }
        levels += 2;
    }
    Err(Error::QuadratureNotConverged(last_change))
}
