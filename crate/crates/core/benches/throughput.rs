use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use line_darp::adversary::{FamilyKind, FamilyOptions};
use line_darp::batch::{fuzz, random_query, sweep, Execution, FuzzConfig};
use line_darp::offline::{solve, SolverConfig};

const MODES: [Execution; 2] = [Execution::Sequential, Execution::Parallel];

fn bench_solver(c: &mut Criterion) {
    let cfg = SolverConfig::default();
    let queries: Vec<_> = (0..64).map(|seed| random_query(seed, 6)).collect();
    c.bench_function("solve 64 queries n<=6", |b| b.iter(|| queries.iter().map(|q| solve(q, &cfg).unwrap().length).sum::<f64>()));
}

fn bench_fuzz(c: &mut Criterion) {
    let mut group = c.benchmark_group("fuzz");
    group.sample_size(10);
    for execution in MODES {
        let cfg = FuzzConfig { cases: 100, n_max: 5, execution, ..FuzzConfig::default() };
        group.bench_with_input(BenchmarkId::new("100 cases", format!("{execution:?}")), &cfg, |b, cfg| {
            b.iter(|| black_box(fuzz(cfg)).failures.len())
        });
    }
    group.finish();
}

fn bench_sweep(c: &mut Criterion) {
    let mut group = c.benchmark_group("sweep");
    group.sample_size(10);
    let thetas: Vec<f64> = (0..9).map(|i| 2.1 + 0.1 * i as f64).collect();
    let opts = FamilyOptions::default();
    let cfg = SolverConfig::default();
    for execution in MODES {
        group.bench_with_input(BenchmarkId::new("waiting eps=1e-3", format!("{execution:?}")), &execution, |b, &e| {
            b.iter(|| sweep(FamilyKind::Waiting, &thetas, 1e-3, &opts, &cfg, 1e-9, e).len())
        });
    }
    group.finish();
}

criterion_group!(benches, bench_solver, bench_fuzz, bench_sweep);
criterion_main!(benches);
