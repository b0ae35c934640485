use std::f64::consts::PI;

use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use nsbesov::multipliers::leray_project;
use nsbesov::norms::{besov, weak_lp_norm};
use nsbesov::perturbed::{apply_b, semigroup_contour, semigroup_timestep, ContourSpec, NeumannConfig};
use nsbesov::random::{random_field, SpectrumProfile};
use nsbesov::solvers::{solve_stationary, StationaryConfig};
use nsbesov::{Background, Grid, VectorField};

fn field(grid: &Grid, seed: u64) -> VectorField {
    let k_cut = grid.k_axis_cut().min(4.0);
    random_field(grid, &SpectrumProfile::new(-1.0, k_cut, seed), true).unwrap()
}

fn background(grid: &Grid) -> Background {
    let u = random_field(grid, &SpectrumProfile::new(-2.0, 1.8, 7), true).unwrap();
    Background::new(u.scale(0.05 / weak_lp_norm(&u, 3.0))).unwrap()
}

fn transforms(c: &mut Criterion) {
    let mut group = c.benchmark_group("transform");
    for pts in [16, 32, 64] {
        let grid = Grid::new(3, pts, 2.0 * PI).unwrap();
        let v = field(&grid, 1);
        group.bench_with_input(BenchmarkId::new("to_samples", pts), &v, |b, v| b.iter(|| black_box(v.to_samples())));
        group.bench_with_input(BenchmarkId::new("leray_project", pts), &v, |b, v| b.iter(|| leray_project(black_box(v))));
    }
    group.finish();
}

fn norms(c: &mut Criterion) {
    let mut group = c.benchmark_group("norms");
    for pts in [16, 32] {
        let grid = Grid::new(3, pts, 2.0 * PI).unwrap();
        let v = field(&grid, 2);
        group.bench_with_input(BenchmarkId::new("besov_p2", pts), &v, |b, v| b.iter(|| besov(v, 0.5, 2.0, f64::INFINITY)));
        group.bench_with_input(BenchmarkId::new("besov_p3", pts), &v, |b, v| b.iter(|| besov(v, 0.0, 3.0, 1.0)));
        group.bench_with_input(BenchmarkId::new("weak_l3", pts), &v, |b, v| b.iter(|| weak_lp_norm(v, 3.0)));
    }
    group.finish();
}

fn operators(c: &mut Criterion) {
    let mut group = c.benchmark_group("operators");
    group.sample_size(20);
    for pts in [16, 32] {
        let grid = Grid::new(3, pts, 2.0 * PI).unwrap();
        let bg = background(&grid);
        let w = field(&grid, 3);
        group.bench_with_input(BenchmarkId::new("apply_b", pts), &w, |b, w| b.iter(|| apply_b(w, &bg).unwrap()));
        group.bench_with_input(BenchmarkId::new("timestep_t0.1_dt0.01", pts), &w, |b, w| {
            b.iter(|| semigroup_timestep(w, 0.1, &bg, 0.01).unwrap())
        });
    }
    group.finish();
}

fn contour(c: &mut Criterion) {
    let mut group = c.benchmark_group("contour");
    group.sample_size(10);
    let grid = Grid::new(3, 8, 2.0 * PI).unwrap();
    let bg = background(&grid);
    let w = field(&grid, 4);
    let spec = ContourSpec::default_for(1.0);
    let cfg = NeumannConfig::default();
    group.bench_function("semigroup_N8_t1", |b| b.iter(|| semigroup_contour(&w, 1.0, &bg, &spec, &cfg, 1e-6).unwrap()));
    group.finish();
}

fn stationary(c: &mut Criterion) {
    let mut group = c.benchmark_group("stationary");
    group.sample_size(10);
    let grid = Grid::new(3, 16, 2.0 * PI).unwrap();
    let f = field(&grid, 5);
    let f = f.scale(0.5 / besov(&f, -1.5, 2.0, f64::INFINITY));
    group.bench_function("picard_N16", |b| b.iter(|| solve_stationary(&f, &StationaryConfig::default()).unwrap()));
    group.finish();
}

criterion_group!(benches, transforms, norms, operators, contour, stationary);
criterion_main!(benches);
