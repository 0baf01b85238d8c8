use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use rcc::census::{estimate_counts, CensusConfig};
use rcc::exec::Parallelism;
use rcc::graph::{Graph, GraphModel};
use rcc::lifting::{sample_lifting, SamplingConfig, SamplingMode};
use rcc::occurrence::Approximation;

fn er(n: usize, p: f64) -> Graph {
    (0..)
        .map(|s| GraphModel::ErdosRenyi { n, p }.sample(s).unwrap())
        .find(Graph::is_connected)
        .unwrap()
}

const MODES: [(&str, Parallelism); 2] =
    [("sequential", Parallelism::Sequential), ("parallel", Parallelism::Parallel)];

fn lifting(c: &mut Criterion) {
    let mut group = c.benchmark_group("sample_lifting");
    group.sample_size(10);
    for n in [50usize, 100, 200] {
        let g = er(n, 0.3);
        for (name, parallelism) in MODES {
            let mode = SamplingMode::ExpectedCells { nu: 10.0 * n as f64, threshold: 4 };
            let mut cfg = SamplingConfig::new(200, mode, Approximation::Fast, 1);
            cfg.edge_probability = Some(0.3);
            cfg.parallelism = parallelism;
            group.bench_with_input(BenchmarkId::new(name, n), &g, |b, g| {
                b.iter(|| black_box(sample_lifting(g, &cfg).unwrap()))
            });
        }
    }
    group.finish();
}

fn census(c: &mut Criterion) {
    let mut group = c.benchmark_group("estimate_counts");
    group.sample_size(10);
    let g = er(100, 0.3);
    for approximation in [Approximation::Fast, Approximation::Estimated] {
        for (name, parallelism) in MODES {
            let mut cfg = CensusConfig::new(200, approximation, 2);
            cfg.parallelism = parallelism;
            group.bench_function(BenchmarkId::new(name, approximation), |b| {
                b.iter(|| black_box(estimate_counts(&g, &cfg).unwrap()))
            });
        }
    }
    group.finish();
}

criterion_group!(benches, lifting, census);
criterion_main!(benches);
