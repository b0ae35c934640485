use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use log::info;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::report::{emit_report, fmt_f64, ReportFormat, Reportable};
use crate::error::{Error, Result};
use crate::field::{SpectralField, VectorField};
use crate::grid::Grid;
use crate::multipliers::{resolvent_lp_gain, SectorPoint};
use crate::norms::{besov, verify_embedding, verify_product, weak_lp_norm, EnsembleSpec};
use crate::perturbed::{
    ab_ratio, box_window_max, critical_sweep, generator_residual, resolvent_a, verify_smoothing, Background,
    DuhamelConfig, HeatPropagator, NeumannConfig, Propagator, StepPropagator,
};
use crate::snapshot::load_vector_field;
use crate::random::{random_field, random_scalar_field, SpectrumProfile};
use crate::stats::{log_grid, relative_drift, RatioStats};

pub const SUITE_NAMES: [&str; 8] = ["ab", "critical", "embedding", "generator", "multipliers", "product", "resolvent", "semigroup"];

/// Largest relative drift of the max ratio across resolutions still called stable.
pub const DRIFT_TOL: f64 = 0.25;

fn default_points() -> Vec<usize> {
    vec![32]
}
fn default_length() -> f64 {
    16.0 * std::f64::consts::PI
}
fn default_size() -> usize {
    100
}
fn default_k_cut() -> f64 {
    1.0
}
fn default_background() -> f64 {
    0.05
}
fn default_dt() -> f64 {
    0.05
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteConfig {
    #[serde(default = "default_n")]
    pub n: usize,
    #[serde(default = "default_points")]
    pub points: Vec<usize>,
    #[serde(default = "default_length")]
    pub length: f64,
    #[serde(default = "default_p")]
    pub p: f64,
    #[serde(default = "default_s")]
    pub s: f64,
    #[serde(default = "default_tau")]
    pub tau: f64,
    #[serde(default = "default_size")]
    pub ensemble_size: usize,
    /// Ensemble spectral exponent; `None` gives the flat `Ḃ^s_{p,∞}` profile `−n/2 − s`.
    #[serde(default)]
    pub alpha: Option<f64>,
    #[serde(default = "default_k_cut")]
    pub k_cut: f64,
    #[serde(default)]
    pub seed: u64,
    /// `‖U‖_{L^{n,∞}}` of the random background used by the operator suites.
    #[serde(default = "default_background")]
    pub background: f64,
    #[serde(default = "default_dt")]
    pub dt: f64,
    /// Snapshot replacing the random background; its grid must match every resolution run.
    #[serde(default)]
    pub background_snapshot: Option<PathBuf>,
    /// Time-window bounds of the operator suites; default from `k_cut` and the box window.
    #[serde(default)]
    pub t_min: Option<f64>,
    #[serde(default)]
    pub t_max: Option<f64>,
}

fn default_n() -> usize {
    3
}
fn default_p() -> f64 {
    2.0
}
fn default_s() -> f64 {
    0.25
}
fn default_tau() -> f64 {
    0.5
}

impl Default for SuiteConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("all fields have defaults")
    }
}

impl SuiteConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidConfig(e.to_string()))
    }

    pub fn alpha(&self) -> f64 {
        self.alpha.unwrap_or(-(self.n as f64) / 2.0 - self.s)
    }

    fn ensemble(&self) -> EnsembleSpec {
        EnsembleSpec { size: self.ensemble_size, alpha: self.alpha(), k_cut: self.k_cut, seed: self.seed }
    }
}

/// One row of a detail table: abscissa (`t`, `|λ|` or member index) and the two sides.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DetailRow {
    pub x: f64,
    pub lhs_norm: f64,
    pub rhs_scale: f64,
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteResult {
    pub suite: String,
    pub params: String,
    pub resolution: usize,
    /// Name of the abscissa column.
    pub x_name: &'static str,
    pub rows: Vec<DetailRow>,
    pub ratio_max: f64,
    pub ratio_median: f64,
}

impl Reportable for SuiteResult {
    fn csv_header(&self) -> Vec<String> {
        [self.x_name, "lhs_norm", "rhs_scale", "ratio"].iter().map(|s| s.to_string()).collect()
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        self.rows
            .iter()
            .map(|r| [r.x, r.lhs_norm, r.rhs_scale, r.ratio].iter().map(|&v| fmt_f64(v)).collect())
            .collect()
    }

    fn json(&self) -> serde_json::Value {
        serde_json::to_value(self).unwrap_or(json!({}))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteVerdict {
    pub suite: String,
    pub params: String,
    pub drift: f64,
    pub finite: bool,
    pub stable: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    /// Sorted by suite name, then parameters, then resolution.
    pub results: Vec<SuiteResult>,
    pub verdicts: Vec<SuiteVerdict>,
}

impl Reportable for SuiteReport {
    fn csv_header(&self) -> Vec<String> {
        ["suite", "params", "ratio_max", "ratio_median", "resolution"].iter().map(|s| s.to_string()).collect()
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        self.results
            .iter()
            .map(|r| {
                vec![
                    r.suite.clone(),
                    r.params.clone(),
                    fmt_f64(r.ratio_max),
                    fmt_f64(r.ratio_median),
                    r.resolution.to_string(),
                ]
            })
            .collect()
    }

    fn json(&self) -> serde_json::Value {
        json!({ "verdicts": self.verdicts })
    }

    fn text(&self) -> String {
        let mut out = String::new();
        for v in &self.verdicts {
            out.push_str(&format!(
                "{:<12} {:<32} drift {:>8.4} {}\n",
                v.suite,
                v.params,
                v.drift,
                if v.stable { "stable" } else { "UNSTABLE" }
            ));
        }
        out
    }
}

impl SuiteReport {
    /// Writes `summary.csv`, `verdicts.txt` and one `<suite>_N<points>.csv` per result.
    pub fn emit(&self, dir: &Path) -> Result<()> {
        emit_report(self, ReportFormat::Csv, &dir.join("summary.csv"))?;
        emit_report(self, ReportFormat::Text, &dir.join("verdicts.txt"))?;
        for r in &self.results {
            emit_report(r, ReportFormat::Csv, &dir.join(format!("{}_N{}.csv", r.suite, r.resolution)))?;
        }
        Ok(())
    }
}

/// Expands `all` and validates names; the result is sorted and deduplicated.
pub fn parse_selection(names: &[String]) -> Result<Vec<&'static str>> {
    let mut set = BTreeSet::new();
    for name in names {
        if name == "all" {
            set.extend(SUITE_NAMES);
            continue;
        }
        match SUITE_NAMES.iter().find(|&&s| s == name) {
            Some(&s) => {
                set.insert(s);
            }
            None => return Err(Error::InvalidConfig(format!("unknown suite '{name}'"))),
        }
    }
    if set.is_empty() {
        return Err(Error::EmptySelection);
    }
    Ok(set.into_iter().collect())
}

fn finish(suite: &str, params: String, grid: &Grid, x_name: &'static str, rows: Vec<DetailRow>) -> Result<SuiteResult> {
    let ratios: Vec<f64> = rows.iter().map(|r| r.ratio).collect();
    let stats = RatioStats::from_ratios(&ratios)?;
    Ok(SuiteResult {
        suite: suite.to_string(),
        params,
        resolution: grid.points(),
        x_name,
        rows,
        ratio_max: stats.max,
        ratio_median: stats.median,
    })
}

fn background(grid: &Grid, cfg: &SuiteConfig) -> Result<Background> {
    if let Some(path) = &cfg.background_snapshot {
        let u = load_vector_field(path)?;
        let g = u.grid();
        if g.dim() != grid.dim() || g.points() != grid.points() || g.length() != grid.length() {
            return Err(Error::GridMismatch);
        }
        let comps = u
            .into_components()
            .into_iter()
            .map(|c| {
                let real = c.is_real();
                SpectralField::from_coeffs(grid, c.into_coeffs(), real)
            })
            .collect::<Result<Vec<_>>>()?;
        return Background::new(VectorField::new(comps)?);
    }
    if cfg.background == 0.0 {
        return Ok(Background::zero(grid));
    }
    let profile = SpectrumProfile::new(-(grid.dim() as f64) / 2.0 - 0.5, cfg.k_cut, cfg.seed.wrapping_add(1_000_003));
    let u = random_field(grid, &profile, true)?;
    let scale = cfg.background / weak_lp_norm(&u, grid.dim() as f64);
    Background::new(u.scale(scale))
}

fn u_label(cfg: &SuiteConfig) -> String {
    match &cfg.background_snapshot {
        Some(_) => "snapshot".into(),
        None => cfg.background.to_string(),
    }
}

fn propagator(bg: Background, dt: f64) -> Box<dyn Propagator> {
    if bg.is_zero() {
        Box::new(HeatPropagator::new(bg.grid()))
    } else {
        Box::new(StepPropagator { bg, dt })
    }
}

fn member(grid: &Grid, cfg: &SuiteConfig, alpha: f64, i: u64) -> Result<VectorField> {
    random_field(grid, &SpectrumProfile::new(alpha, cfg.k_cut, cfg.seed.wrapping_add(i)), true)
}

/// Time samples inside the box-validity window, starting at the band's diffusive time.
fn suite_times(grid: &Grid, cfg: &SuiteConfig) -> Vec<f64> {
    let hi = cfg.t_max.unwrap_or_else(|| box_window_max(grid));
    let lo = cfg.t_min.unwrap_or_else(|| (1.0 / (cfg.k_cut * cfg.k_cut)).min(hi / 10.0));
    log_grid(lo, hi, 4)
}

fn run_one(name: &str, grid: &Grid, cfg: &SuiteConfig) -> Result<SuiteResult> {
    let n = grid.dim() as f64;
    let (p, s, tau) = (cfg.p, cfg.s, cfg.tau);
    match name {
        "multipliers" => {
            let f = random_scalar_field(grid, &cfg.ensemble().profile(0))?;
            let (b, p0) = (n / p + 0.5, 2.0 * p);
            let lambdas = log_grid(grid.k_min().powi(2) * 4.0, cfg.k_cut * cfg.k_cut, 4);
            let rows = lambdas
                .par_iter()
                .map(|&r| {
                    let pt = SectorPoint::polar(r, std::f64::consts::FRAC_PI_2)?;
                    let (_, g) = resolvent_lp_gain(&f, pt, b, s, p, p0, f64::INFINITY)?;
                    Ok(DetailRow { x: r, lhs_norm: g.lhs, rhs_scale: g.rhs_scale, ratio: g.ratio })
                })
                .collect::<Result<Vec<_>>>()?;
            finish(name, format!("b={b};s={s};p={p};p0={p0}"), grid, "lambda_abs", rows)
        }
        "embedding" => {
            let rep = verify_embedding(grid, &cfg.ensemble(), s, p)?;
            let rows = pair_rows(&rep.pairs);
            finish(name, format!("s={s};p={p};ell={}", rep.ell), grid, "member", rows)
        }
        "product" => {
            let rep = verify_product(grid, &cfg.ensemble(), p, s)?;
            finish(name, format!("s={s};p={p}"), grid, "member", pair_rows(&rep.pairs))
        }
        "ab" => {
            let bg = background(grid, cfg)?;
            let rows = (0..cfg.ensemble_size as u64)
                .into_par_iter()
                .map(|i| {
                    let w = member(grid, cfg, cfg.alpha(), i)?;
                    let rhs = bg.weak_ln_norm() * besov(&w, s, p, f64::INFINITY);
                    let ratio = ab_ratio(&w, &bg, s, p)?;
                    Ok(DetailRow { x: i as f64, lhs_norm: ratio * rhs, rhs_scale: rhs, ratio })
                })
                .collect::<Result<Vec<_>>>()?;
            finish(name, format!("s={s};p={p};U={}", u_label(cfg)), grid, "member", rows)
        }
        "semigroup" => {
            let prop = propagator(background(grid, cfg)?, cfg.dt);
            let f = member(grid, cfg, cfg.alpha(), 0)?;
            let times = suite_times(grid, cfg);
            let rep = verify_smoothing(prop.as_ref(), std::slice::from_ref(&f), s, tau, p, &times)?;
            let tr = rep.traces.first().ok_or(Error::InsufficientSamples { needed: 1, got: 0 })?;
            let u = prop.background().weak_ln_norm();
            let base = besov(&f, s, p, f64::INFINITY);
            let rows = times
                .iter()
                .enumerate()
                .map(|(i, &t)| DetailRow {
                    x: t,
                    lhs_norm: tr.high_norm[i],
                    rhs_scale: t.powf(-tau / 2.0) * (1.0 + u) * base,
                    ratio: tr.ratio_ii[i],
                })
                .collect();
            finish(name, format!("s={s};tau={tau};p={p};U={}", u_label(cfg)), grid, "t", rows)
        }
        "resolvent" => {
            let bg = background(grid, cfg)?;
            let f = member(grid, cfg, cfg.alpha(), 0)?;
            let base = besov(&f, s, p, f64::INFINITY);
            let lambdas = log_grid(grid.k_min().powi(2) * 4.0, cfg.k_cut * cfg.k_cut, 4);
            let rows = lambdas
                .par_iter()
                .map(|&r| {
                    let pt = SectorPoint::polar(r, std::f64::consts::FRAC_PI_2)?;
                    let (v, _) = resolvent_a(&f, pt, &bg, &NeumannConfig { p, ..NeumannConfig::default() })?;
                    let lhs = besov(&v, s + tau, p, f64::INFINITY);
                    let rhs = r.powf(-(2.0 - tau) / 2.0) * base;
                    Ok(DetailRow { x: r, lhs_norm: lhs, rhs_scale: rhs, ratio: lhs / rhs })
                })
                .collect::<Result<Vec<_>>>()?;
            finish(name, format!("s={s};tau={tau};p={p};U={}", u_label(cfg)), grid, "lambda_abs", rows)
        }
        "critical" => {
            let prop = propagator(background(grid, cfg)?, cfg.dt);
            let g = member(grid, cfg, -n / 2.0 - s + 2.0, 0)?;
            let times = suite_times(grid, cfg);
            let pts = critical_sweep(prop.as_ref(), &g, &times, s, p, &DuhamelConfig::default())?;
            let rows = pts
                .iter()
                .map(|c| DetailRow { x: c.t, lhs_norm: c.lhs, rhs_scale: c.rhs, ratio: c.ratio })
                .collect();
            finish(name, format!("s={s};p={p};U={}", u_label(cfg)), grid, "t", rows)
        }
        "generator" => {
            let prop = propagator(background(grid, cfg)?, cfg.dt);
            let f = member(grid, cfg, cfg.alpha(), 0)?;
            let tau_g = tau.min(s / 2.0);
            let base = besov(&f, s, p, f64::INFINITY);
            let times = suite_times(grid, cfg);
            let rows = times
                .iter()
                .map(|&t| {
                    let r = generator_residual(prop.as_ref(), &f, t, s - 2.0 - tau_g, p)?;
                    let rhs = t.powf(tau_g / 2.0) * base;
                    Ok(DetailRow { x: t, lhs_norm: r, rhs_scale: rhs, ratio: r / rhs })
                })
                .collect::<Result<Vec<_>>>()?;
            finish(name, format!("s={s};tau={tau_g};p={p};U={}", u_label(cfg)), grid, "t", rows)
        }
        _ => Err(Error::InvalidConfig(format!("unknown suite '{name}'"))),
    }
}

fn pair_rows(pairs: &[(f64, f64)]) -> Vec<DetailRow> {
    pairs
        .iter()
        .enumerate()
        .map(|(i, &(a, b))| DetailRow {
            x: i as f64,
            lhs_norm: a,
            rhs_scale: b,
            ratio: if b > 0.0 { a / b } else { f64::NAN },
        })
        .collect()
}

/// Runs every selected suite on every configured resolution. Output order is
/// fixed (suite name, parameters, resolution), so reruns are byte-identical.
pub fn run_verification_suites(selection: &[String], cfg: &SuiteConfig) -> Result<SuiteReport> {
    let names = parse_selection(selection)?;
    let grids = cfg
        .points
        .iter()
        .map(|&np| Grid::new(cfg.n, np, cfg.length))
        .collect::<Result<Vec<_>>>()?;
    let jobs: Vec<(&str, &Grid)> = names.iter().flat_map(|&s| grids.iter().map(move |g| (s, g))).collect();
    let mut results = jobs
        .par_iter()
        .map(|&(s, g)| {
            info!("suite {s} at N = {}", g.points());
            run_one(s, g, cfg)
        })
        .collect::<Result<Vec<_>>>()?;
    results.sort_by(|a, b| (&a.suite, &a.params, a.resolution).cmp(&(&b.suite, &b.params, b.resolution)));
    let mut verdicts = Vec::new();
    for name in &names {
        let group: Vec<&SuiteResult> = results.iter().filter(|r| r.suite == *name).collect();
        let maxes: Vec<f64> = group.iter().map(|r| r.ratio_max).collect();
        let finite = maxes.iter().all(|m| m.is_finite());
        let drift = maxes
            .iter()
            .flat_map(|a| maxes.iter().map(move |b| relative_drift(*a, *b)))
            .fold(0.0, f64::max);
        verdicts.push(SuiteVerdict {
            suite: name.to_string(),
            params: group.first().map(|r| r.params.clone()).unwrap_or_default(),
            drift,
            finite,
            stable: finite && drift < DRIFT_TOL,
        });
    }
    Ok(SuiteReport { results, verdicts })
}
