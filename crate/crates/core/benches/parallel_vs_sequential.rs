use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use eelab::epr::{chsh_grid_max, monte_carlo_singles_with, Side};
use eelab::spin_dynamics::{integrate_ensemble, FieldRamp, LLParams, SpinState, Vec3};
use eelab::Execution;

const STRATEGIES: [(&str, Execution); 2] = [
    ("sequential", Execution::Sequential),
    ("parallel", Execution::Parallel),
];

fn singles(c: &mut Criterion) {
    let mut group = c.benchmark_group("mc_singles");
    group.sample_size(10);
    for n in [100_000u64, 1_000_000] {
        for (name, exec) in STRATEGIES {
            group.bench_with_input(BenchmarkId::new(name, n), &n, |b, &n| {
                b.iter(|| monte_carlo_singles_with(black_box(0.3), Side::A, 0.0, n, 42, exec).unwrap())
            });
        }
    }
    group.finish();
}

fn chsh_scan(c: &mut Criterion) {
    let mut group = c.benchmark_group("chsh_grid_scan");
    group.sample_size(10);
    for divisions in [90usize, 180] {
        for (name, exec) in STRATEGIES {
            group.bench_with_input(BenchmarkId::new(name, divisions), &divisions, |b, &d| {
                b.iter(|| chsh_grid_max(black_box(d), exec).unwrap())
            });
        }
    }
    group.finish();
}

fn spin_ensemble(c: &mut Criterion) {
    let ramp = FieldRamp::linear(Vec3::X, 1.0, 1.0).unwrap();
    let params = LLParams::new(1.0, Vec3::Z, 1e-3).unwrap();
    let states: Vec<SpinState> = (0..256)
        .map(|k| {
            let a = k as f64 * 0.1;
            SpinState::new(Vec3::new(a.cos(), a.sin(), 0.3), 1.0).unwrap()
        })
        .collect();
    let mut group = c.benchmark_group("spin_ensemble");
    group.sample_size(10);
    for (name, exec) in STRATEGIES {
        group.bench_function(name, |b| {
            b.iter(|| integrate_ensemble(black_box(&states), &ramp, &params, exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, singles, chsh_scan, spin_ensemble);
criterion_main!(benches);
