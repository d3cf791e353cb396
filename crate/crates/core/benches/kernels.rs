//! Kernel benchmarks. Group names carry the backend, so
//!
//!     cargo bench -p simplicial
//!     cargo bench -p simplicial --no-default-features
//!
//! produce side-by-side rayon / sequential results in the criterion report.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use simplicial::experiments::{known_labels, presets, sample_prior};
use simplicial::objective::Objective;
use simplicial::par::BACKEND;
use simplicial::potential::rw_probabilities;
use simplicial::sbtm::{generate, GeneratedGraph};
use simplicial::{enumerate_cliques, LabelDistribution};

fn balanced_graph() -> GeneratedGraph {
    generate(&presets::balanced_spec(), 1).unwrap()
}

fn bench_generate(c: &mut Criterion) {
    let mut g = c.benchmark_group(format!("generate/{BACKEND}"));
    for (name, spec) in [
        ("balanced", presets::balanced_spec()),
        ("imbalanced", presets::imbalanced_spec()),
    ] {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| generate(black_box(&spec), 7).unwrap())
        });
    }
    g.finish();
}

fn bench_enumerate(c: &mut Criterion) {
    let graph = balanced_graph().graph;
    let mut g = c.benchmark_group(format!("enumerate/{BACKEND}"));
    for m in [3, 5] {
        g.bench_with_input(BenchmarkId::from_parameter(m), &m, |b, &m| {
            b.iter(|| enumerate_cliques(black_box(&graph), m))
        });
    }
    g.finish();
}

fn bench_gradient(c: &mut Criterion) {
    let gg = balanced_graph();
    let complex = enumerate_cliques(&gg.graph, 5);
    let dist = LabelDistribution::uniform(gg.graph.node_count(), 5);
    let mut g = c.benchmark_group(format!("objective_gradient/{BACKEND}"));
    for m in [2, 5] {
        let obj = Objective::new(&complex, 5, m, 1.0).unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(m), &m, |b, _| {
            b.iter(|| obj.value_and_prob_grad(black_box(&dist)))
        });
    }
    g.finish();
}

fn bench_rw(c: &mut Criterion) {
    let gg = balanced_graph();
    let prior = sample_prior(&gg.truth, 5, 0.03, 1).unwrap();
    let known = known_labels(&gg.truth, &prior);
    let mut g = c.benchmark_group(format!("rw_probabilities/{BACKEND}"));
    g.sample_size(10);
    g.bench_function("balanced", |b| {
        b.iter(|| rw_probabilities(black_box(&gg.graph), &known, 5).unwrap())
    });
    g.finish();
}

criterion_group!(benches, bench_generate, bench_enumerate, bench_gradient, bench_rw);
criterion_main!(benches);
