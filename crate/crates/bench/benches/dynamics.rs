use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use dexcite::analysis::{find_equilibria, threshold_scan};
use dexcite::navigation::run_scenario;
use dexcite::simulate::{simulate_full, simulate_reduced, step_full};
use dexcite::{ModelParams, ReducedState};
use dexcite_bench::{axis_input, oblique_start, quick_scan, short_tracking};

fn full_step(c: &mut Criterion) {
    let p = ModelParams::type1();
    let mut group = c.benchmark_group("step_full");
    for dim in [2usize, 10, 100] {
        let s = oblique_start(dim);
        let u = axis_input(dim, &p);
        group.bench_with_input(BenchmarkId::from_parameter(dim), &dim, |b, _| {
            b.iter(|| step_full(black_box(&s), black_box(&u), &p, p.default_dt()).unwrap())
        });
    }
    group.finish();
}

fn runs(c: &mut Criterion) {
    let p = ModelParams::type1();
    let dt = p.default_dt();
    c.bench_function("simulate_full n=3 t=10", |b| {
        let s = oblique_start(3);
        let u = axis_input(3, &p);
        b.iter(|| simulate_full(&s, |_| u.clone(), &p, dt, 10.0).unwrap())
    });
    c.bench_function("simulate_reduced t=10", |b| {
        b.iter(|| simulate_reduced(&ReducedState::new(0.0, 0.0), |_| 4.0, &p, dt, 10.0).unwrap())
    });
}

fn analysis(c: &mut Criterion) {
    let p = ModelParams::type1();
    c.bench_function("find_equilibria", |b| b.iter(|| find_equilibria(black_box(2.3), &p).unwrap()));
    let mut group = c.benchmark_group("threshold_scan");
    group.sample_size(10);
    let cfg = quick_scan(&p);
    group.bench_function("type1", |b| b.iter(|| threshold_scan(&p, &cfg).unwrap()));
    group.finish();
}

fn navigation(c: &mut Criterion) {
    let mut group = c.benchmark_group("navigation");
    group.sample_size(10);
    let cfg = short_tracking(20.0);
    group.bench_function("tracking t=20", |b| b.iter(|| run_scenario(&cfg).unwrap()));
    group.finish();
}

criterion_group!(benches, full_step, runs, analysis, navigation);
criterion_main!(benches);
