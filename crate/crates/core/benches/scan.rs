//! Benchmarks comparing the data-parallel scan paths with the sequential
//! fallback.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use cavres::dynamics::{scan_grid, scan_grid_seq};
use cavres::reservoir::{validate_flat_spectrum, ReservoirModel, ReservoirSpec};
use cavres::states::EffectiveParams;

fn bench_scan_grid(c: &mut Criterion) {
    let p = EffectiveParams::reference_example();
    let mut group = c.benchmark_group("scan_grid");
    for (t_steps, gamma_steps) in [(121usize, 5usize), (601, 13)] {
        let ts: Vec<f64> = (0..t_steps)
            .map(|k| 6.0 * k as f64 / (t_steps - 1) as f64)
            .collect();
        let gammas: Vec<f64> = (0..gamma_steps)
            .map(|k| std::f64::consts::PI * k as f64 / (gamma_steps - 1) as f64)
            .collect();
        let points = t_steps * gamma_steps;
        group.bench_with_input(BenchmarkId::new("sequential", points), &points, |b, _| {
            b.iter(|| scan_grid_seq(black_box(&p), black_box(&ts), black_box(&gammas)).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("parallel", points), &points, |b, _| {
            b.iter(|| scan_grid(black_box(&p), black_box(&ts), black_box(&gammas)).unwrap())
        });
    }
    group.finish();
}

fn bench_reservoir_validation(c: &mut Criterion) {
    let mut group = c.benchmark_group("reservoir_validate");
    group.sample_size(10);
    let model =
        ReservoirModel::new(ReservoirSpec::with_default_spacing(200, 1.0).unwrap()).unwrap();
    let samples: Vec<f64> = (1..=60).map(|k| 0.1 * k as f64).collect();
    group.bench_function("time_sweep_n200", |b| {
        b.iter(|| validate_flat_spectrum(black_box(&model), black_box(&samples)).unwrap())
    });
    group.bench_function("diagonalize_n200", |b| {
        b.iter(|| {
            ReservoirModel::new(ReservoirSpec::with_default_spacing(200, 1.0).unwrap()).unwrap()
        })
    });
    group.finish();
}

criterion_group!(benches, bench_scan_grid, bench_reservoir_validation);
criterion_main!(benches);
