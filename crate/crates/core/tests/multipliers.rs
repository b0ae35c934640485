use std::f64::consts::PI;

use approx::assert_relative_eq;
use num_complex::Complex64;
use proptest::prelude::*;

use nsbesov::field::Components;
use nsbesov::multipliers::{
    apply_multiplier, apply_multiplier_dyadic, composition, divergence, frac_laplacian, gradient, heat_semigroup,
    lambda_plus_laplacian, leray_project, resolvent_laplacian, resolvent_lp_gain, MultiplierSymbol, SectorPoint,
    DEFAULT_OMEGA,
};
use nsbesov::norms::{besov, dyadic_decompose};
use nsbesov::random::{random_field, random_scalar_field, SpectrumProfile};
use nsbesov::stats::{log_grid, loglog_fit};
use nsbesov::{Error, Grid, SpectralField, VectorField};

fn grid(pts: usize) -> Grid {
    Grid::new(3, pts, 2.0 * PI).unwrap()
}

fn rand_scalar(g: &Grid, seed: u64) -> SpectralField {
    random_scalar_field(g, &SpectrumProfile::new(-1.0, 7.0, seed)).unwrap()
}

fn rel(a: &SpectralField, b: &SpectralField) -> f64 {
    (a - b).max_abs_coeff() / b.max_abs_coeff()
}

fn single_mode(g: &Grid, m: [i32; 3]) -> SpectralField {
    let mut c = vec![Complex64::new(0.0, 0.0); g.len()];
    c[g.index_of(&m).unwrap()] = Complex64::new(1.0, 0.0);
    SpectralField::from_coeffs(g, c, false).unwrap()
}

fn spectral_inner(a: &VectorField, b: &VectorField) -> Complex64 {
    (0..a.dim())
        .flat_map(|c| a.component(c).coeffs().iter().zip(b.component(c).coeffs()).map(|(x, y)| x * y.conj()))
        .sum()
}

#[test]
fn multiplier_examples() {
    let g = grid(16);
    let f = rand_scalar(&g, 1);
    let id = apply_multiplier(&MultiplierSymbol::identity(), &f).unwrap();
    assert_eq!(id.coeffs(), f.coeffs());
    let c = SpectralField::cosine(&g, &[1, 0, 0], 1.0).unwrap();
    let lap = apply_multiplier(&MultiplierSymbol::abs_power(2.0), &c).unwrap();
    assert!(rel(&lap, &c) < 1e-15);
    assert!(rel(&frac_laplacian(&c, 2.0), &c) < 1e-15);
    let h = MultiplierSymbol::abs_power(0.5);
    assert!(rel(&apply_multiplier_dyadic(&h, &f).unwrap(), &apply_multiplier(&h, &f).unwrap()) < 1e-12);
}

#[test]
fn singular_symbol_is_an_error() {
    let g = grid(8);
    let sym = MultiplierSymbol::new("bad", None, true, |k| Complex64::new(1.0 / (k[0] - 1.0), 0.0));
    let f = random_scalar_field(&g, &SpectrumProfile::new(0.0, 3.0, 2)).unwrap();
    assert!(matches!(apply_multiplier(&sym, &f), Err(Error::SymbolSingular(_))));
}

#[test]
fn leray_examples() {
    let g = grid(16);
    let phi = rand_scalar(&g, 3);
    let gr = gradient(&phi);
    assert!(leray_project(&gr).max_abs_coeff() <= 1e-15 * gr.max_abs_coeff());
    let v = random_field(&g, &SpectrumProfile::new(0.0, 7.0, 4), true).unwrap();
    assert!((&leray_project(&v) - &v).max_abs_coeff() <= 1e-12 * v.max_abs_coeff());
    let w = random_field(&g, &SpectrumProfile::new(0.0, 7.0, 5), false).unwrap();
    let pw = leray_project(&w);
    assert!(divergence(&pw).max_abs_coeff() <= 1e-14 * pw.max_abs_coeff());
    assert!(pw.is_divergence_free());
}

#[test]
fn leray_is_self_adjoint() {
    let g = grid(16);
    let v = random_field(&g, &SpectrumProfile::new(0.0, 7.0, 6), false).unwrap();
    let w = random_field(&g, &SpectrumProfile::new(0.0, 7.0, 7), false).unwrap();
    let a = spectral_inner(&leray_project(&v), &w);
    let b = spectral_inner(&v, &leray_project(&w));
    assert!((a - b).norm() <= 1e-12 * a.norm());
}

#[test]
fn frac_laplacian_inverse_and_block_bound() {
    let g = grid(32);
    let f = random_scalar_field(&g, &SpectrumProfile::new(-1.0, 15.0, 8)).unwrap();
    for a in [-2.0, -0.7, 0.5, 2.0, 3.0] {
        let back = frac_laplacian(&frac_laplacian(&f, a), -a);
        assert!(rel(&back, &f) < 1e-12, "a = {a}");
        // Per block the symbol lies within 2^{±|a|} of 2^{ja}; L^2 block norms see that exactly.
        let s = 0.3;
        let lhs = besov(&frac_laplacian(&f, a), s - a, 2.0, f64::INFINITY);
        let rhs = besov(&f, s, 2.0, f64::INFINITY);
        assert!(lhs / rhs <= 4f64.powf(a.abs()));
        assert!(lhs / rhs >= 4f64.powf(-a.abs()));
    }
}

#[test]
fn resolvent_examples() {
    let g = grid(16);
    let pt = SectorPoint::polar(3.0, 2.0 * PI / 3.0).unwrap();
    let m = single_mode(&g, [1, 2, 0]);
    let r = resolvent_laplacian(&m, pt, 2.0).unwrap();
    let want = (pt.lambda - 5.0).inv();
    assert!((r.coeffs()[g.index_of(&[1, 2, 0]).unwrap()] - want).norm() < 1e-15);

    let f = rand_scalar(&g, 9);
    let back = lambda_plus_laplacian(&resolvent_laplacian(&f, pt, 2.0).unwrap(), pt.lambda);
    assert!(rel(&back, &f) < 1e-12);

    assert!(matches!(SectorPoint::polar(1.0, 0.1), Err(Error::SectorViolation { .. })));
    assert!(SectorPoint::new(Complex64::new(0.0, 0.0), DEFAULT_OMEGA).is_err());
    assert!(SectorPoint::new(Complex64::new(-1.0, 0.0), 2.0).is_err());
}

#[test]
fn resolvent_sweep_is_bounded_and_monotone() {
    let g = grid(32);
    let f = random_scalar_field(&g, &SpectrumProfile::new(-1.0, 15.0, 10)).unwrap();
    let base = besov(&f, 0.25, 2.0, f64::INFINITY);
    let radii = log_grid(0.5, 500.0, 3);
    let norms: Vec<f64> = radii
        .iter()
        .map(|&r| {
            let pt = SectorPoint::polar(r, 2.0 * PI / 3.0).unwrap();
            besov(&resolvent_laplacian(&f, pt, 2.0).unwrap(), 0.25, 2.0, f64::INFINITY)
        })
        .collect();
    // On this ray |λ|² < |λ − |k|²|², so |λ|·ratio stays below 1 and rises towards it.
    let consts: Vec<f64> = radii.iter().zip(&norms).map(|(r, v)| r * v / base).collect();
    assert!(consts.iter().all(|&c| c < 1.0), "{consts:?}");
    for w in consts.windows(2) {
        assert!(w[1] >= w[0] * (1.0 - 1e-12), "{consts:?}");
    }
    // The resolvent itself shrinks along the ray.
    for w in norms.windows(2) {
        assert!(w[1] <= w[0] * (1.0 + 1e-12), "{norms:?}");
    }
}

#[test]
fn resolvent_identity() {
    let g = grid(16);
    let f = rand_scalar(&g, 11);
    let l = SectorPoint::polar(2.0, 2.0).unwrap();
    let mu = SectorPoint::polar(7.0, -2.5).unwrap();
    let lhs = &resolvent_laplacian(&f, l, 2.0).unwrap() - &resolvent_laplacian(&f, mu, 2.0).unwrap();
    let rr = resolvent_laplacian(&resolvent_laplacian(&f, mu, 2.0).unwrap(), l, 2.0).unwrap();
    let rhs = rr.scale_complex(mu.lambda - l.lambda);
    assert!(rel(&lhs, &rhs) < 1e-11);
}

/// Zero-phase field `f̂(k) = |k|^α`, concentrated at the origin, so every
/// block saturates Bernstein's inequality.
fn concentrated(g: &Grid, alpha: f64, k_cut: f64) -> SpectralField {
    let c: Vec<Complex64> = (0..g.len())
        .map(|i| {
            let k = g.k2(i).sqrt();
            if i == 0 || k > k_cut {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new(k.powf(alpha), 0.0)
            }
        })
        .collect();
    SpectralField::from_coeffs(g, c, true).unwrap()
}

#[test]
fn resolvent_gain_slope() {
    let g = grid(64);
    let (n, p, p0, s) = (3.0, 2.0, 4.0, 0.0);
    let b = n / p + 0.5;
    let f = concentrated(&g, -n + n / p - s, 30.0);
    let lams = log_grid(16.0, 256.0, 4);
    let mut ys = Vec::new();
    let mut exponent = 0.0;
    for &r in &lams {
        let pt = SectorPoint::polar(r, PI).unwrap();
        let (_, rep) = resolvent_lp_gain(&f, pt, b, s, p, p0, f64::INFINITY).unwrap();
        ys.push(rep.lhs);
        exponent = rep.exponent;
    }
    let slope = loglog_fit(&lams, &ys).unwrap().slope;
    assert_relative_eq!(exponent, -(b - n * (1.0 / p - 1.0 / p0)) / 2.0);
    assert!((slope - exponent).abs() <= 0.1 * exponent.abs(), "slope {slope} vs {exponent}");
}

#[test]
fn resolvent_gain_preconditions_and_single_block() {
    let g = grid(16);
    let f = SpectralField::cosine(&g, &[2, 0, 0], 1.0).unwrap();
    let pt = SectorPoint::polar(4.0, PI).unwrap();
    assert!(matches!(resolvent_lp_gain(&f, pt, 1.0, 0.0, 2.0, 4.0, 1.0), Err(Error::ConditionBViolation { .. })));
    assert!(resolvent_lp_gain(&f, pt, 2.0, 0.0, 2.0, 1.5, 1.0).is_err());
    // cos(2x) lies in block 1 only; R = (−4 − 4)^{−1} on it.
    let (out, rep) = resolvent_lp_gain(&f, pt, 2.0, 0.0, 2.0, 4.0, 1.0).unwrap();
    let amp = 1.0 / 8.0;
    let l4 = amp * (2.0 * PI).powf(0.75) * (3.0f64 / 8.0).powf(0.25);
    assert_relative_eq!(rep.lhs, l4, max_relative = 1e-12);
    let l2 = (2.0 * PI).powf(1.5) / 2f64.sqrt();
    let exponent = -(2.0 - 3.0 * (0.5 - 0.25)) / 2.0;
    assert_relative_eq!(rep.ratio, l4 / (4f64.powf(exponent) * l2), max_relative = 1e-12);
    assert_eq!(dyadic_decompose(&out).block(1).unwrap().max_abs_coeff(), out.max_abs_coeff());
}

#[test]
fn composition_paths_agree() {
    let g = grid(16);
    let f = rand_scalar(&g, 12);
    let pt = SectorPoint::polar(5.0, 2.0).unwrap();
    let (a, b) = (0.8, 1.7);
    let direct = composition(&f, pt, a, b).unwrap();
    let ab = frac_laplacian(&resolvent_laplacian(&f, pt, b).unwrap(), a);
    let ba = resolvent_laplacian(&frac_laplacian(&f, a), pt, b).unwrap();
    assert!(rel(&ab, &direct) < 1e-12);
    assert!(rel(&ba, &direct) < 1e-12);
    assert!(rel(&composition(&f, pt, 0.0, b).unwrap(), &resolvent_laplacian(&f, pt, b).unwrap()) < 1e-15);

    let m = single_mode(&g, [1, 1, 1]);
    let c = composition(&m, pt, 2.0, 2.0).unwrap();
    let want = 3.0 * (pt.lambda - 3.0).inv();
    assert!((c.coeffs()[g.index_of(&[1, 1, 1]).unwrap()] - want).norm() < 1e-14);
    assert!(composition(&f, pt, 2.0, 1.0).is_err());
}

#[test]
fn heat_examples() {
    let g = grid(16);
    let f = rand_scalar(&g, 13);
    assert_eq!(heat_semigroup(&f, 0.0).unwrap().coeffs(), f.coeffs());
    let c = SpectralField::cosine(&g, &[0, 0, 1], 1.0).unwrap();
    assert!(rel(&heat_semigroup(&c, 1.0).unwrap(), &c.scale((-1.0f64).exp())) < 1e-15);
    assert!(matches!(heat_semigroup(&f, -1.0), Err(Error::NegativeTime(_))));
}

#[test]
fn heat_smoothing_ratio_is_resolution_stable() {
    let (s, tau) = (0.25, 0.5);
    let mut sups = Vec::new();
    for pts in [32, 64] {
        let g = grid(pts);
        let f = random_scalar_field(&g, &SpectrumProfile::new(-1.5 - s, 15.0, 14)).unwrap();
        let base = besov(&f, s, 2.0, f64::INFINITY);
        let sup = log_grid(0.01, 1.0, 4)
            .iter()
            .map(|&t| t.powf(tau / 2.0) * besov(&heat_semigroup(&f, t).unwrap(), s + tau, 2.0, 1.0) / base)
            .fold(0.0, f64::max);
        assert!(sup.is_finite());
        sups.push(sup);
    }
    assert!((sups[0] - sups[1]).abs() / sups[1] < 0.25, "{sups:?}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn leray_idempotent_and_divergence_free(seed in 0u64..10_000, alpha in -2.0f64..1.0) {
        let g = grid(16);
        let v = random_field(&g, &SpectrumProfile::new(alpha, 7.0, seed), false).unwrap();
        let pv = leray_project(&v);
        prop_assert!((&leray_project(&pv) - &pv).max_abs_coeff() <= 1e-12 * pv.max_abs_coeff());
        prop_assert!(divergence(&pv).max_abs_coeff() <= 1e-13 * pv.max_abs_coeff());
    }

    #[test]
    fn commuting_symbols_commute(seed in 0u64..10_000, a in -1.5f64..1.5, t in 0.0f64..0.5, b in 0.0f64..3.0) {
        let g = grid(16);
        let f = rand_scalar(&g, seed);
        let pt = SectorPoint::polar(3.0, 2.0).unwrap();
        let x = heat_semigroup(&frac_laplacian(&f, a), t).unwrap();
        let y = frac_laplacian(&heat_semigroup(&f, t).unwrap(), a);
        prop_assert!(rel(&x, &y) <= 1e-12);
        let x = resolvent_laplacian(&heat_semigroup(&f, t).unwrap(), pt, b).unwrap();
        let y = heat_semigroup(&resolvent_laplacian(&f, pt, b).unwrap(), t).unwrap();
        prop_assert!(rel(&x, &y) <= 1e-12);
    }

    #[test]
    fn heat_semigroup_law(seed in 0u64..10_000, t1 in 0.0f64..0.3, t2 in 0.0f64..0.3) {
        let g = grid(16);
        let f = rand_scalar(&g, seed);
        let a = heat_semigroup(&heat_semigroup(&f, t1).unwrap(), t2).unwrap();
        let b = heat_semigroup(&f, t1 + t2).unwrap();
        prop_assert!((&a - &b).max_abs_coeff() <= 1e-13 * f.max_abs_coeff());
    }

    #[test]
    fn vector_and_scalar_paths_agree(seed in 0u64..10_000, a in -1.0f64..2.0) {
        let g = grid(8);
        let v = random_field(&g, &SpectrumProfile::new(0.0, 3.0, seed), true).unwrap();
        let fv = frac_laplacian(&v, a);
        for c in 0..3 {
            let fs = frac_laplacian(v.component(c), a);
            prop_assert_eq!(fv.components()[c].coeffs(), fs.coeffs());
        }
    }
}
