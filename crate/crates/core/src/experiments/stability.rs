use log::info;
use serde::Serialize;
use serde_json::json;

use super::config::{ExperimentConfig, FieldRecipe, SolverMethod};
use super::fit::{fit_decay, DecayFit};
use super::report::{fmt_f64, Reportable};
use crate::error::Result;
use crate::field::VectorField;
use crate::grid::Grid;
use crate::norms::{besov, lp_norm, weak_lp_norm};
use crate::perturbed::{Background, HeatPropagator, Propagator, StepPropagator};
use crate::random::{random_field, SpectrumProfile};
use crate::solvers::{
    solve_ns_direct, solve_perturbation_picard, solve_stationary, DirectConfig, PicardConfig, StationaryConfig,
};
use crate::stats::geometric_times;

pub const STABILITY_COLUMNS: [&str; 6] = ["t", "besov_high", "besov_base", "besov_low", "weak_lp_high", "weak_lp_low"];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StabilityRow {
    pub t: f64,
    /// `‖w‖_{Ḃ^{s(p)+τ_H}_{p,1}}`.
    pub besov_high: f64,
    /// `‖w‖_{Ḃ^{s(p)}_{p,∞}}`.
    pub besov_base: f64,
    /// `‖w‖_{Ḃ^{s(p)−τ_L}_{p,∞}}`.
    pub besov_low: f64,
    /// `‖w‖_{L^{n/(1−τ_H)}}`.
    pub weak_lp_high: f64,
    /// `‖w‖_{L^{n/(1+τ_L),∞}}`.
    pub weak_lp_low: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StabilitySummary {
    pub slope_high: Option<f64>,
    pub slope_low: Option<f64>,
    pub predicted_high: f64,
    pub predicted_low: f64,
    pub pass_high: bool,
    pub pass_low: bool,
    pub gamma: f64,
    #[serde(rename = "tau_H")]
    pub tau_h: f64,
    #[serde(rename = "tau_L")]
    pub tau_l: f64,
    pub s: f64,
    pub p: f64,
    pub n: usize,
    #[serde(rename = "N")]
    pub points: usize,
    #[serde(rename = "L")]
    pub length: f64,
    pub seeds: Vec<u64>,
}

#[derive(Clone, Debug)]
pub struct StabilityReport {
    pub rows: Vec<StabilityRow>,
    pub summary: StabilitySummary,
    pub fit_high: Option<DecayFit>,
    pub fit_low: Option<DecayFit>,
    /// `ε = 0`: the run starts at the stationary solution and no slopes are fitted.
    pub stationary_fixture: bool,
    pub epsilon: f64,
    /// `sup_t ‖u(t) − U‖_{Ḃ^{s(p)}_{p,∞}}`.
    pub sup_base: f64,
    pub stationary_norm: f64,
    pub stationary_iterations: usize,
}

impl StabilityReport {
    /// `sup_t ‖u(t) − U‖_{Ḃ^{s(p)}_{p,∞}} / ε`.
    pub fn boundedness_constant(&self) -> f64 {
        if self.epsilon > 0.0 {
            self.sup_base / self.epsilon
        } else {
            f64::NAN
        }
    }
}

impl Reportable for StabilityReport {
    fn csv_header(&self) -> Vec<String> {
        STABILITY_COLUMNS.iter().map(|s| s.to_string()).collect()
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        self.rows
            .iter()
            .map(|r| {
                [r.t, r.besov_high, r.besov_base, r.besov_low, r.weak_lp_high, r.weak_lp_low]
                    .iter()
                    .map(|&x| fmt_f64(x))
                    .collect()
            })
            .collect()
    }

    fn json(&self) -> serde_json::Value {
        serde_json::to_value(&self.summary).unwrap_or(json!({}))
    }
}

/// Random solenoidal field with profile `|k|^alpha`, rescaled so that its
/// `Ḃ^{sigma}_{p,∞}` norm equals `recipe.amplitude`.
pub fn synthesize(grid: &Grid, recipe: &FieldRecipe, alpha: f64, sigma: f64, p: f64) -> Result<VectorField> {
    if recipe.amplitude == 0.0 {
        return Ok(VectorField::zeros(grid));
    }
    let v = random_field(grid, &SpectrumProfile::new(alpha, recipe.k_cut, recipe.seed), true)?;
    let norm = besov(&v, sigma, p, f64::INFINITY);
    Ok(v.scale(recipe.amplitude / norm))
}

/// Sample instants `t_min · 2^{i/2} <= t_max`.
pub fn window_times(cfg: &ExperimentConfig) -> Vec<f64> {
    let count = ((cfg.window.t_max / cfg.window.t_min).log2() * 2.0 + 1e-9).floor() as usize + 1;
    geometric_times(cfg.window.t_min, count)
}

/// Stationary solve, perturbation synthesis, evolution and decay fits.
pub fn run_stability_experiment(cfg: &ExperimentConfig) -> Result<StabilityReport> {
    cfg.validate()?;
    let grid = cfg.grid.build()?;
    let n = cfg.grid.n as f64;
    let sp = cfg.s_p();
    let f = synthesize(&grid, &cfg.forcing, cfg.forcing_alpha(), sp - 2.0, cfg.p)?;
    let stationary = solve_stationary(&f, &StationaryConfig { p: cfg.p, ..StationaryConfig::default() })?;
    info!("stationary solution: {} iterations, norm {:.4e}", stationary.iterations, stationary.norm);
    let u_st = stationary.u.clone();
    let b = synthesize(&grid, &cfg.perturbation, cfg.perturbation_alpha(), sp, cfg.p)?;
    let times = window_times(cfg);

    let states: Vec<VectorField> = match cfg.method {
        SolverMethod::Direct => {
            let forcing = (f.max_abs_coeff() > 0.0).then_some(&f);
            let path = solve_ns_direct(&(&u_st + &b), forcing, &times, &DirectConfig { dt: cfg.dt, ..DirectConfig::default() })?;
            path.states[1..].iter().map(|u| u - &u_st).collect()
        }
        SolverMethod::Picard => {
            let bg = Background::new(u_st.clone())?;
            let prop: Box<dyn Propagator> = if bg.is_zero() {
                Box::new(HeatPropagator::new(&grid))
            } else {
                Box::new(StepPropagator { bg, dt: cfg.dt })
            };
            let pc = PicardConfig { p: cfg.p, ..PicardConfig::default() };
            let (path, _) = solve_perturbation_picard(&b, prop.as_ref(), &times, &pc)?;
            path.states[1..].to_vec()
        }
    };

    let rows: Vec<StabilityRow> = times
        .iter()
        .zip(&states)
        .map(|(&t, w)| StabilityRow {
            t,
            besov_high: besov(w, sp + cfg.tau_h, cfg.p, 1.0),
            besov_base: besov(w, sp, cfg.p, f64::INFINITY),
            besov_low: besov(w, sp - cfg.tau_l, cfg.p, f64::INFINITY),
            weak_lp_high: lp_norm(w, n / (1.0 - cfg.tau_h)),
            weak_lp_low: weak_lp_norm(w, n / (1.0 + cfg.tau_l)),
        })
        .collect();
    let sup_base = rows.iter().map(|r| r.besov_base).fold(0.0, f64::max);
    let stationary_fixture = cfg.perturbation.amplitude == 0.0;
    let predicted_high = -cfg.tau_h / 2.0;
    let predicted_low = -cfg.gamma() / 2.0 + 0.0;
    let window = (cfg.window.t_min, cfg.window.t_max);
    let (fit_high, fit_low) = if stationary_fixture {
        (None, None)
    } else {
        let high: Vec<(f64, f64)> = rows.iter().map(|r| (r.t, r.besov_high)).collect();
        let low: Vec<(f64, f64)> = rows.iter().map(|r| (r.t, r.besov_low)).collect();
        (Some(fit_decay(&high, window, predicted_high)?), Some(fit_decay(&low, window, predicted_low)?))
    };
    let summary = StabilitySummary {
        slope_high: fit_high.as_ref().map(|f| f.slope),
        slope_low: fit_low.as_ref().map(|f| f.slope),
        predicted_high,
        predicted_low,
        pass_high: fit_high.as_ref().is_some_and(DecayFit::decays_at_least),
        pass_low: fit_low.as_ref().is_some_and(DecayFit::decays_at_least),
        gamma: cfg.gamma(),
        tau_h: cfg.tau_h,
        tau_l: cfg.tau_l,
        s: cfg.s,
        p: cfg.p,
        n: cfg.grid.n,
        points: cfg.grid.points,
        length: cfg.grid.length,
        seeds: vec![cfg.forcing.seed, cfg.perturbation.seed],
    };
    Ok(StabilityReport {
        rows,
        summary,
        fit_high,
        fit_low,
        stationary_fixture,
        epsilon: cfg.perturbation.amplitude,
        sup_base,
        stationary_norm: stationary.norm,
        stationary_iterations: stationary.iterations,
    })
}
