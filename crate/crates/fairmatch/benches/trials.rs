//! Parallel-versus-sequential throughput of the two hot paths: the
//! three-LP benchmark bundle and a multi-trial experiment run.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use fairmatch::harness::{synthetic_trip_instance, AlgoConfig};
use fairmatch::model::fragment_types;
use fairmatch::{benchmarks, benchmarks_seq, run_experiment, run_experiment_seq};

fn bench_benchmarks(c: &mut Criterion) {
    let (inst, _) = synthetic_trip_instance(12, 40, 7).expect("synthetic instance");
    let inst = fragment_types(&inst).expect("fragment");
    let mut group = c.benchmark_group("benchmark_bundle");
    group.sample_size(10);
    group.bench_function("parallel", |b| {
        b.iter(|| benchmarks(black_box(&inst)).expect("solve"))
    });
    group.bench_function("sequential", |b| {
        b.iter(|| benchmarks_seq(black_box(&inst)).expect("solve"))
    });
    group.finish();
}

fn bench_trials(c: &mut Criterion) {
    let (inst, _) = synthetic_trip_instance(12, 40, 7).expect("synthetic instance");
    let configs = vec![AlgoConfig::tsf(0.5, 0.25, 0.25).expect("weights")];
    let mut group = c.benchmark_group("experiment_200_trials");
    group.sample_size(10);
    group.bench_function("parallel", |b| {
        b.iter(|| run_experiment(black_box(&inst), &configs, 200, 1).expect("run"))
    });
    group.bench_function("sequential", |b| {
        b.iter(|| run_experiment_seq(black_box(&inst), &configs, 200, 1).expect("run"))
    });
    group.finish();
}

criterion_group!(benches, bench_benchmarks, bench_trials);
criterion_main!(benches);
