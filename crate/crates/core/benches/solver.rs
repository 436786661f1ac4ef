use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use pidkit::harness::{check_si_right_monotonicity, sample_named, Sweep};
use pidkit::par::Execution;
use pidkit::{decompose_with, SolverOptions};

fn sweeps(c: &mut Criterion) {
    let mut group = c.benchmark_group("si-right sweep, 64 trials");
    group.sample_size(10);
    for (label, execution) in [
        ("sequential", Execution::Sequential),
        ("parallel", Execution::Parallel),
    ] {
        let mut sweep = Sweep::new(64, 0, 1e-4);
        sweep.execution = execution;
        group.bench_function(BenchmarkId::from_parameter(label), |b| {
            b.iter(|| black_box(check_si_right_monotonicity(&sweep)))
        });
    }
    group.finish();
}

fn decomposition(c: &mut Criterion) {
    let p = sample_named(&[("X", 4), ("Y", 4), ("Z", 4)], 1).unwrap();
    let mut group = c.benchmark_group("decompose 4x4x4");
    for (label, execution) in [
        ("sequential", Execution::Sequential),
        ("parallel", Execution::Parallel),
    ] {
        let opts = SolverOptions {
            execution,
            ..SolverOptions::default()
        };
        group.bench_function(BenchmarkId::from_parameter(label), |b| {
            b.iter(|| black_box(decompose_with(&p, &["X"], &["Y"], &["Z"], &opts).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(benches, sweeps, decomposition);
criterion_main!(benches);
