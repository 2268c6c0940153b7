use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use floatloc::oracle::random_baseline_with;
use floatloc::worstcase::verify_worst_case_with;
use floatloc::{Execution, Instance};
use std::hint::black_box;

fn montecarlo(c: &mut Criterion) {
    let instance = Instance::new(0.0, 1000.0, [180.0, 410.0, 655.0], 6).unwrap();
    let mut group = c.benchmark_group("random_baseline");
    group.sample_size(10);
    for trials in [10_000usize, 100_000] {
        for (name, exec) in [
            ("sequential", Execution::Sequential),
            ("parallel", Execution::Parallel),
        ] {
            group.bench_with_input(BenchmarkId::new(name, trials), &trials, |b, &trials| {
                b.iter(|| random_baseline_with(black_box(&instance), trials, 7, exec).unwrap())
            });
        }
    }
    group.finish();
}

fn grid_sweep(c: &mut Criterion) {
    let mut group = c.benchmark_group("verify_worst_case");
    group.sample_size(10);
    for (name, exec) in [
        ("sequential", Execution::Sequential),
        ("parallel", Execution::Parallel),
    ] {
        group.bench_function(BenchmarkId::new(name, "nf6_nb2_grid200"), |b| {
            b.iter(|| verify_worst_case_with(1000.0, black_box(6), 2, 200, exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, montecarlo, grid_sweep);
criterion_main!(benches);
