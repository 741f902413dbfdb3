//! Parallel against sequential batch paths. Without the `parallel` feature
//! both sides run on one thread.

use std::hint::black_box;
use std::sync::Arc;

use criterion::{criterion_group, criterion_main, Criterion};

use coxdiag::coxeter::{build_system, Family};
use coxdiag::generate::{corpus, corpus_sequential};
use coxdiag::reduce::{reduce_batch, reduce_batch_sequential, ReduceOptions};
use coxdiag::rules::RuleSet;
use coxdiag::trace::{verify_batch, verify_batch_sequential};

fn batch(c: &mut Criterion) {
    let sys = Arc::new(build_system(Family::A, 3).unwrap());
    let rules = RuleSet::builtin(&sys);
    let opts = ReduceOptions::default();

    let mut g = c.benchmark_group("generate");
    g.sample_size(10);
    g.bench_function("parallel", |b| b.iter(|| corpus(&sys, 32, 20, black_box(1), &rules)));
    g.bench_function("sequential", |b| b.iter(|| corpus_sequential(&sys, 32, 20, black_box(1), &rules)));
    g.finish();

    let ds = corpus_sequential(&sys, 32, 20, 1, &rules);
    let mut g = c.benchmark_group("reduce");
    g.sample_size(10);
    g.bench_function("parallel", |b| b.iter(|| reduce_batch(black_box(&ds), &rules, &opts)));
    g.bench_function("sequential", |b| b.iter(|| reduce_batch_sequential(black_box(&ds), &rules, &opts)));
    g.finish();

    let items: Vec<_> = ds
        .iter()
        .zip(reduce_batch_sequential(&ds, &rules, &opts))
        .map(|(d, r)| (d.clone(), r.expect("corpus reduces").trace))
        .collect();
    let mut g = c.benchmark_group("verify");
    g.sample_size(10);
    g.bench_function("parallel", |b| b.iter(|| verify_batch(black_box(&items), &rules)));
    g.bench_function("sequential", |b| b.iter(|| verify_batch_sequential(black_box(&items), &rules)));
    g.finish();
}

criterion_group!(benches, batch);
criterion_main!(benches);
