use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;

use nsbesov::multipliers::{frac_laplacian, heat_semigroup, laplacian, leray_project, resolvent_laplacian, SectorPoint};
use nsbesov::norms::{besov, critical_s};
use nsbesov::perturbed::{
    ab_ratio, apply_a, apply_b, apply_c_theta, box_window_max, critical_sweep, duhamel, generator_residual,
    lambda_minus_a, propagate_path, resolvent_a, semigroup_contour, semigroup_timestep, verify_generator,
    verify_smoothing, ConstantSource, ContourPropagator, ContourSpec, DuhamelConfig, HeatPropagator, NeumannConfig,
    Propagator, StepPropagator, DEFAULT_CONTOUR_TOL,
};
use nsbesov::random::{random_field, SpectrumProfile};
use nsbesov::stats::log_grid;
use nsbesov::{weak_lp_norm, Background, Error, Grid, VectorField};

mod common;

use common::{modes, sym_convolution};

fn grid(pts: usize) -> Grid {
    Grid::new(3, pts, 2.0 * PI).unwrap()
}

fn rel_l2(a: &VectorField, b: &VectorField) -> f64 {
    (a - b).energy().sqrt() / b.energy().sqrt()
}

fn field(g: &Grid, alpha: f64, k_cut: f64, seed: u64) -> VectorField {
    random_field(g, &SpectrumProfile::new(alpha, k_cut, seed), true).unwrap()
}

fn background(g: &Grid, weak_ln: f64, seed: u64) -> Background {
    let u = random_field(g, &SpectrumProfile::new(-2.0, 1.8, seed), true).unwrap();
    Background::new(u.scale(weak_ln / weak_lp_norm(&u, 3.0))).unwrap()
}

fn two_modes(g: &Grid) -> (VectorField, VectorField) {
    let u = modes(g, &[([0, 1, 0], [1.0, 0.0, 0.0], Complex64::new(0.3, 0.0))]);
    let w = modes(g, &[([1, 0, 1], [0.0, 1.0, 0.0], Complex64::new(0.0, -0.5))]);
    (u, w)
}

#[test]
fn background_invariants() {
    let g = grid(8);
    let bg = background(&g, 0.2, 1);
    assert!((bg.weak_ln_norm() - weak_lp_norm(bg.u(), 3.0)).abs() <= 1e-10 * bg.weak_ln_norm());
    assert!(Background::zero(&g).is_zero());
    let rough = random_field(&g, &SpectrumProfile::new(0.0, 2.0, 2), false).unwrap();
    assert!(matches!(Background::new(rough), Err(Error::NotSolenoidal(_))));
}

#[test]
fn apply_b_examples() {
    let g = grid(16);
    let w = field(&g, 0.0, 4.0, 3);
    assert_eq!(apply_b(&w, &Background::zero(&g)).unwrap().max_abs_coeff(), 0.0);
    let (u, w1) = two_modes(&g);
    let bg = Background::new(u.clone()).unwrap();
    let b = apply_b(&w1, &bg).unwrap();
    let oracle = sym_convolution(&u, &w1);
    assert!((&b - &oracle).max_abs_coeff() <= 1e-12 * oracle.max_abs_coeff());
    assert!(b.is_divergence_free());
    assert!(matches!(apply_b(&field(&grid(8), 0.0, 2.0, 1), &bg), Err(Error::GridMismatch)));
}

#[test]
fn apply_b_ratio_is_resolution_stable() {
    let (s, p) = (critical_s(3, 2.0), 2.0);
    let mut maxes = Vec::new();
    for pts in [16, 32] {
        let g = Grid::new(3, pts, 4.0 * PI).unwrap();
        let bg = background(&g, 0.1, 5);
        let m = (0..4)
            .map(|seed| ab_ratio(&field(&g, -1.5 - s, 2.5, 10 + seed), &bg, s, p).unwrap())
            .fold(0.0, f64::max);
        maxes.push(m);
    }
    assert!(maxes.iter().all(|m| m.is_finite() && *m > 0.0));
    assert!((maxes[0] - maxes[1]).abs() / maxes[1] < 0.25, "{maxes:?}");
    let g = grid(8);
    assert!(ab_ratio(&field(&g, 0.0, 2.0, 1), &Background::zero(&g), s, p).unwrap().is_nan());
}

#[test]
fn apply_a_examples() {
    let g = grid(16);
    let w = field(&g, -1.0, 5.0, 4);
    let lap = laplacian(&w).scale(-1.0);
    assert_eq!(apply_a(&w, &Background::zero(&g)).unwrap().max_abs_coeff(), lap.max_abs_coeff());
    assert!((&apply_a(&w, &Background::zero(&g)).unwrap() - &lap).max_abs_coeff() == 0.0);
    let bg = background(&g, 0.1, 6);
    assert_eq!(apply_a(&VectorField::zeros(&g), &bg).unwrap().max_abs_coeff(), 0.0);
    let assembled = &lap + &apply_b(&w, &bg).unwrap();
    assert!((&apply_a(&w, &bg).unwrap() - &assembled).max_abs_coeff() <= 1e-12 * assembled.max_abs_coeff());
}

#[test]
fn c_theta_examples() {
    let g = grid(16);
    let w = field(&g, -1.0, 5.0, 7);
    assert_eq!(apply_c_theta(&w, &Background::zero(&g), 1.0).unwrap().max_abs_coeff(), 0.0);
    assert!(matches!(apply_c_theta(&w, &Background::zero(&g), 2.5), Err(Error::ThetaOutOfRange(_))));

    let (u, w1) = two_modes(&g);
    let bg = Background::new(u.clone()).unwrap();
    for theta in [0.0, 0.7, 2.0] {
        let c = apply_c_theta(&w1, &bg, theta).unwrap();
        // |k_in|² = 2 on the input mode.
        let oracle = frac_laplacian(&sym_convolution(&u, &w1.scale(2f64.powf(-theta / 2.0))), -(2.0 - theta));
        assert!((&c - &oracle).max_abs_coeff() <= 1e-12 * oracle.max_abs_coeff(), "theta {theta}");
    }
}

#[test]
fn c_theta_conjugation_identity() {
    let g = grid(16);
    let bg = background(&g, 0.2, 8);
    let f = field(&g, -1.0, 5.0, 9);
    let pt = SectorPoint::polar(1.0, PI / 3.0).unwrap();
    let r = |v: &VectorField| resolvent_laplacian(v, pt, 2.0).unwrap();
    let mut term = f.clone();
    let mut lhs = f.clone();
    for _ in 0..2 {
        term = r(&apply_b(&term, &bg).unwrap());
        lhs = &lhs + &term;
    }
    for theta in [0.0, 1.0, 2.0] {
        let inner = frac_laplacian(&f, theta);
        let mut term = inner.clone();
        let mut sum = inner.clone();
        for _ in 0..2 {
            let c = apply_c_theta(&term, &bg, theta).unwrap();
            term = r(&frac_laplacian(&c, 2.0));
            sum = &sum + &term;
        }
        let rhs = frac_laplacian(&sum, -theta);
        assert!(rel_l2(&rhs, &lhs) < 1e-10, "theta {theta}");
    }
}

#[test]
fn resolvent_a_examples() {
    let g = grid(8);
    let f = field(&g, -1.0, 2.5, 10);
    let pt = SectorPoint::polar(1.0, PI / 3.0).unwrap();
    let cfg = NeumannConfig::default();
    let (r0, rep0) = resolvent_a(&f, pt, &Background::zero(&g), &cfg).unwrap();
    assert_eq!(rep0.terms_used, 1);
    assert_eq!((&r0 - &resolvent_laplacian(&f, pt, 2.0).unwrap()).max_abs_coeff(), 0.0);

    let bg = background(&g, 0.05, 11);
    let (r, rep) = resolvent_a(&f, pt, &bg, &cfg).unwrap();
    assert!(rep.converged && rep.last_term_norm < cfg.tol);
    let resid = rel_l2(&lambda_minus_a(&r, pt.lambda, &bg).unwrap(), &f);
    let back = lambda_minus_a(&r, pt.lambda, &bg).unwrap();
    assert!((&back - &f).energy().sqrt() / f.energy().sqrt() < 10.0 * cfg.tol, "{resid}");
    // Converged regime: the last three increments shrink geometrically.
    let inc = &rep.increments;
    assert!(inc.len() >= 3);
    let tail = &inc[inc.len() - 3..];
    assert!(tail[1] < tail[0] && tail[2] < tail[1], "{inc:?}");
    let ratio = (inc[inc.len() - 1] / inc[0]).powf(1.0 / (inc.len() - 1) as f64);
    assert!(ratio < 1.0);
}

#[test]
fn resolvent_a_gain_along_sweep() {
    let g = grid(16);
    let bg = background(&g, 0.05, 12);
    let f = field(&g, -1.5, 5.0, 13);
    let s = critical_s(3, 2.0);
    let base = besov(&f, s, 2.0, f64::INFINITY);
    let cfg = NeumannConfig::default();
    for tau in [0.0, 1.0] {
        let consts: Vec<f64> = [1.0, 10.0, 100.0]
            .iter()
            .map(|&r| {
                let pt = SectorPoint::polar(r, 2.0 * PI / 3.0).unwrap();
                let (v, _) = resolvent_a(&f, pt, &bg, &cfg).unwrap();
                besov(&v, s + tau, 2.0, f64::INFINITY) * r.powf((2.0 - tau) / 2.0) / base
            })
            .collect();
        let bound = 4.0 * (1.0 + bg.weak_ln_norm()) / (PI / 3.0).sin();
        assert!(consts.iter().all(|&c| c < bound), "tau {tau}: {consts:?}");
    }
}

#[test]
fn neumann_diverges_for_large_background() {
    let g = grid(8);
    let bg = background(&g, 40.0, 14);
    let f = field(&g, -1.0, 2.5, 15);
    let pt = SectorPoint::polar(1.0, PI / 3.0).unwrap();
    let err = resolvent_a(&f, pt, &bg, &NeumannConfig::default()).unwrap_err();
    assert!(matches!(err, Error::NeumannDivergence { .. }), "{err}");
}

#[test]
fn contour_matches_heat_and_decays() {
    let g = grid(8);
    let f = field(&g, -1.0, 2.5, 16);
    let zero = Background::zero(&g);
    for t in [0.1, 1.0, 10.0] {
        let spec = ContourSpec::default_for(t);
        let (v, rep) = semigroup_contour(&f, t, &zero, &spec, &NeumannConfig::default(), DEFAULT_CONTOUR_TOL).unwrap();
        let heat = heat_semigroup(&f, t).unwrap();
        assert!(rel_l2(&v, &heat) < 1e-6, "t {t}: {}", rel_l2(&v, &heat));
        assert!(rep.imag_residue < 1e-9);
        let gap = (-t * g.k_min().powi(2) / 2.0).exp();
        assert!(v.energy().sqrt() <= gap * f.energy().sqrt());
    }
}

#[test]
fn contour_preconditions() {
    let g = grid(8);
    let f = field(&g, -1.0, 2.5, 17);
    let zero = Background::zero(&g);
    let cfg = NeumannConfig::default();
    let short = ContourSpec { r_max: 10.0, ..ContourSpec::default_for(1.0) };
    let err = semigroup_contour(&f, 0.01, &zero, &short, &cfg, DEFAULT_CONTOUR_TOL).unwrap_err();
    assert!(matches!(err, Error::TailBoundViolation { .. }));
    let flat = ContourSpec { theta: 0.1, ..ContourSpec::default_for(1.0) };
    assert!(matches!(semigroup_contour(&f, 1.0, &zero, &flat, &cfg, 1e-6), Err(Error::ThetaOutOfRange(_))));
    assert!(semigroup_contour(&f, 0.0, &zero, &ContourSpec::default_for(1.0), &cfg, 1e-6).is_err());
    let big = background(&g, 40.0, 18);
    let err = semigroup_contour(&f, 1.0, &big, &ContourSpec::default_for(1.0), &cfg, 1e-6).unwrap_err();
    assert!(matches!(err, Error::NeumannDivergence { .. }), "{err}");
}

#[test]
fn contour_and_timestep_agree_and_stay_solenoidal() {
    let g = grid(8);
    let bg = background(&g, 0.05, 19);
    let f = field(&g, -1.0, 2.5, 20);
    let t = 0.5;
    let c = ContourPropagator::new(bg.clone()).propagate(&f, t).unwrap();
    let s = semigroup_timestep(&f, t, &bg, 0.005).unwrap();
    assert!(rel_l2(&c, &s) < 1e-4, "{}", rel_l2(&c, &s));
    assert!(c.is_divergence_free() && s.is_divergence_free());
}

#[test]
fn semigroup_property_both_realizations() {
    let g = grid(8);
    let bg = background(&g, 0.05, 21);
    let f = field(&g, -1.0, 2.5, 22);
    let (t1, t2) = (0.2, 0.3);
    let step = StepPropagator { bg: bg.clone(), dt: 0.05 };
    let contour = ContourPropagator::new(bg);
    for prop in [&step as &dyn Propagator, &contour] {
        let once = prop.propagate(&f, t1 + t2).unwrap();
        let twice = prop.propagate(&prop.propagate(&f, t1).unwrap(), t2).unwrap();
        assert!(rel_l2(&twice, &once) < 1e-8, "{}", rel_l2(&twice, &once));
    }
}

#[test]
fn timestep_examples() {
    let g = grid(8);
    let f = field(&g, -1.0, 2.5, 23);
    let zero = Background::zero(&g);
    let heat = heat_semigroup(&f, 0.7).unwrap();
    assert!((&semigroup_timestep(&f, 0.7, &zero, 0.3).unwrap() - &heat).max_abs_coeff() <= 1e-12 * f.max_abs_coeff());
    assert_eq!(semigroup_timestep(&f, 0.0, &zero, 0.1).unwrap().max_abs_coeff(), f.max_abs_coeff());
    assert!(matches!(semigroup_timestep(&f, -1.0, &zero, 0.1), Err(Error::NegativeTime(_))));
    assert!(semigroup_timestep(&f, 1.0, &zero, 0.0).is_err());
    let huge = background(&g, 200.0, 24);
    assert!(matches!(semigroup_timestep(&f, 2.0, &huge, 0.5), Err(Error::UnstableStep { .. })));
}

#[test]
fn timestep_is_second_order() {
    let g = grid(8);
    let bg = background(&g, 0.2, 25);
    let f = field(&g, -1.0, 2.5, 26);
    let t = 0.4;
    let reference = semigroup_timestep(&f, t, &bg, 0.1 / 64.0).unwrap();
    let err = |dt: f64| rel_l2(&semigroup_timestep(&f, t, &bg, dt).unwrap(), &reference);
    let ratio = err(0.1) / err(0.05);
    assert!((3.5..=4.5).contains(&ratio), "{ratio}");
}

#[test]
fn duhamel_examples() {
    let g = grid(8);
    let heat = HeatPropagator::new(&g);
    let cfg = DuhamelConfig::default();
    let zero_src = ConstantSource(VectorField::zeros(&g));
    assert_eq!(duhamel(&zero_src, 0.0, 1.0, &heat, &cfg).unwrap().0.max_abs_coeff(), 0.0);
    assert!(duhamel(&zero_src, 1.0, 0.5, &heat, &cfg).is_err());

    // Two projected modes; each integrates to (1 − e^{−t|k|²})/|k|².
    let src = leray_project(&modes(
        &g,
        &[([1, 0, 0], [0.0, 1.0, 1.0], Complex64::new(1.0, 0.0)), ([1, 2, 1], [1.0, 0.0, 0.0], Complex64::new(0.0, 0.4))],
    ));
    let t = 0.7;
    let (d, rep) = duhamel(&ConstantSource(src.clone()), 0.0, t, &heat, &cfg).unwrap();
    assert!(rep.rel_change < cfg.tol);
    let closed = heat_semigroup(&src, t).unwrap();
    let mut want = src.clone();
    for c in 0..3 {
        let comp = &mut want.components_mut()[c];
        for (i, z) in comp.coeffs_mut().iter_mut().enumerate() {
            let k2 = g.k2(i);
            if k2 > 0.0 {
                *z = (*z - closed.component(c).coeffs()[i]) / k2;
            }
        }
    }
    assert!((&d - &want).max_abs_coeff() <= 1e-10 * want.max_abs_coeff());
}

#[test]
fn critical_sweep_heat_bounds() {
    let g = grid(16);
    let heat = HeatPropagator::new(&g);
    let src = field(&g, 0.5, 5.0, 27);
    let s = critical_s(3, 2.0);
    let pts = critical_sweep(&heat, &src, &log_grid(0.01, 0.1, 3), s, 2.0, &DuhamelConfig::default()).unwrap();
    for pt in &pts {
        // Per block |k|² >= 4^{j−1}, and A∫e^{−(t−σ)A}g = (1 − e^{−t|k|²}) g.
        assert!(pt.ratio <= 4.0 && pt.ratio > 0.0, "{pt:?}");
        assert!(pt.maximal_regularity <= 1.0 + 1e-8, "{pt:?}");
    }
    assert!(critical_sweep(&heat, &VectorField::zeros(&g), &[0.1], s, 2.0, &DuhamelConfig::default()).is_err());
}

#[test]
fn smoothing_heat_slope_and_window() {
    let g = Grid::new(3, 64, 16.0 * PI).unwrap();
    let heat = HeatPropagator::new(&g);
    let (s, tau) = (0.0, 0.5);
    let kc = g.k_axis_cut();
    let f = field(&g, -1.5 - s, kc, 28);
    let hi = box_window_max(&g);
    // One decade on which the heat cutoff scale sweeps through the band.
    let times = log_grid(0.5 / (kc * kc), 5.0 / (kc * kc), 4);
    let rep = verify_smoothing(&heat, std::slice::from_ref(&f), s, tau, 2.0, &times).unwrap();
    let tr = &rep.traces[0];
    let slope = nsbesov::stats::loglog_fit(&tr.times, &tr.high_norm).unwrap().slope;
    assert!((slope + tau / 2.0).abs() <= 0.1 * tau / 2.0, "slope {slope}");
    assert!(rep.max_i <= 1.0 + 1e-12 && rep.max_iii.is_finite());
    assert!(matches!(
        verify_smoothing(&heat, std::slice::from_ref(&f), s, tau, 2.0, &[2.0 * hi]),
        Err(Error::WindowViolation(_))
    ));
    assert!(matches!(verify_smoothing(&heat, &[f], 0.5, 0.6, 2.0, &times), Err(Error::ExponentOutOfRange(_))));
}

#[test]
fn generator_examples() {
    let g = grid(8);
    let heat = HeatPropagator::new(&g);
    let f = modes(&g, &[([1, 1, 0], [0.0, 0.0, 1.0], Complex64::new(1.0, 0.0))]);
    for t in [0.001, 0.01, 0.1] {
        let r = generator_residual(&heat, &f, t, 0.0, 2.0).unwrap();
        let scalar = ((-2.0 * t).exp() - 1.0) / t + 2.0;
        let want = besov(&f, 0.0, 2.0, f64::INFINITY) * scalar;
        assert!((r - want).abs() <= 1e-6 * want, "t {t}: {r} vs {want}");
    }
    assert!(matches!(verify_generator(&heat, &f, &[0.01, 0.1], 0.5, 0.6, 2.0), Err(Error::ExponentOutOfRange(_))));

    let g = Grid::new(3, 64, 16.0 * PI).unwrap();
    let heat = HeatPropagator::new(&g);
    let s = 0.8;
    let kc = g.k_axis_cut();
    let f = field(&g, -1.5 - s, kc, 29);
    // Block j weighs 2^{−jτ} g(t 4^j) with g(x) = 1 − (1 − e^{−x})/x, peaking
    // near x = 1 + 2/τ; the window keeps that peak inside the band.
    let times = log_grid((1.0 + 4.0 / s) / (kc * kc), box_window_max(&g), 4);
    let fit = verify_generator(&heat, &f, &times, s, s / 2.0, 2.0).unwrap();
    assert!(fit.pass);
    assert!((fit.fit.slope - fit.predicted).abs() <= 0.25 * fit.predicted, "slope {}", fit.fit.slope);
    // Monotone decay towards t = 0 over the sweep.
    assert!(fit.residuals.windows(2).all(|w| w[1] > w[0]), "{:?}", fit.residuals);
}

#[test]
fn propagate_path_rejects_decreasing_times() {
    let g = grid(8);
    let heat = HeatPropagator::new(&g);
    let f = field(&g, -1.0, 2.5, 30);
    assert!(propagate_path(&heat, &f, &[0.2, 0.1]).is_err());
    let path = propagate_path(&heat, &f, &[0.1, 0.3]).unwrap();
    assert!(rel_l2(&path[1], &heat_semigroup(&f, 0.3).unwrap()) < 1e-14);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn b_is_linear_and_solenoidal(seed in 0u64..10_000, a in -2.0f64..2.0) {
        let g = grid(8);
        let bg = background(&g, 0.1, seed);
        let w1 = field(&g, -1.0, 2.5, seed + 1);
        let w2 = field(&g, -1.0, 2.5, seed + 2);
        let lhs = apply_b(&(&w1.scale(a) + &w2), &bg).unwrap();
        let rhs = &apply_b(&w1, &bg).unwrap().scale(a) + &apply_b(&w2, &bg).unwrap();
        prop_assert!((&lhs - &rhs).max_abs_coeff() <= 1e-12 * rhs.max_abs_coeff().max(1e-300));
        prop_assert!(lhs.is_divergence_free());
    }

    #[test]
    fn timestep_preserves_divergence_free(seed in 0u64..10_000) {
        let g = grid(8);
        let bg = background(&g, 0.1, seed);
        let f = field(&g, -1.0, 2.5, seed + 3);
        let v = semigroup_timestep(&f, 0.3, &bg, 0.05).unwrap();
        prop_assert!(v.is_divergence_free());
        prop_assert!(v.energy() < f.energy());
    }
}
