//! Sequential against rayon-parallel execution for the hot paths: sampler
//! output batches, whole converging runs, and preprocessing.
//!
//! Without the `parallel` feature both variants run sequentially.

use std::hint::black_box;

use agpm_core::engine::{RunConfig, Session};
use agpm_core::par::{available_threads, Executor};
use agpm_core::{generate, ClusteringMode, Graph, Pattern, PreprocessedStats};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};

const BATCH: u64 = 16_384;

fn graph() -> Graph {
    generate::power_law(20_000, 4, 2.5, 0.5, 1)
}

fn executors() -> Vec<(&'static str, Executor)> {
    vec![
        ("sequential", Executor::sequential()),
        ("parallel", Executor::new(available_threads().max(2))),
    ]
}

fn sampler_batches(c: &mut Criterion) {
    let g = graph();
    let stats = PreprocessedStats::compute(&g, ClusteringMode::Exact, 1);
    let mut group = c.benchmark_group("outputs");
    group.sample_size(10);
    group.throughput(Throughput::Elements(BATCH));
    for name in ["triangle", "4-clique", "4-chain", "triangle-2-star", "5-house"] {
        let p = Pattern::parse(name).unwrap();
        let session = Session::new(&g, &p, &RunConfig::default(), &stats).unwrap();
        for (label, exec) in executors() {
            group.bench_with_input(BenchmarkId::new(label, name), &exec, |b, exec| {
                b.iter(|| black_box(session.outputs(BATCH, 7, exec)))
            });
        }
    }
    group.finish();
}

fn converging_runs(c: &mut Criterion) {
    let g = graph();
    let stats = PreprocessedStats::compute(&g, ClusteringMode::Exact, 1);
    let mut group = c.benchmark_group("run");
    group.sample_size(10);
    for name in ["4-clique", "triangle-2-star"] {
        let p = Pattern::parse(name).unwrap();
        for (label, threads) in [("sequential", 1), ("parallel", available_threads().max(2))] {
            let cfg = RunConfig {
                threads,
                seed: 3,
                ..RunConfig::default()
            };
            let session = Session::new(&g, &p, &cfg, &stats).unwrap();
            group.bench_function(BenchmarkId::new(label, name), |b| {
                b.iter(|| black_box(session.run(&cfg).unwrap().estimate))
            });
        }
    }
    group.finish();
}

fn preprocessing(c: &mut Criterion) {
    let g = graph();
    let mut group = c.benchmark_group("preprocess");
    group.sample_size(10);
    for mode in [ClusteringMode::Exact, ClusteringMode::Sampled] {
        for (label, parallel) in [("sequential", false), ("parallel", true)] {
            group.bench_function(BenchmarkId::new(label, format!("{mode:?}").to_lowercase()), |b| {
                b.iter(|| black_box(PreprocessedStats::compute_with(&g, mode, 1, 1e-4, parallel)))
            });
        }
    }
    group.finish();
}

criterion_group!(benches, sampler_batches, converging_runs, preprocessing);
criterion_main!(benches);
