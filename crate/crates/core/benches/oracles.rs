use std::sync::Arc;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use incidence_involutions::battery::verify_battery;
use incidence_involutions::classify::{inner_classes, inner_equivalent_oracle, Bounds};
use incidence_involutions::exec::Strategy;
use incidence_involutions::involutions::enumerate_involutions_over;
use incidence_involutions::posets::{Poset, PosetMap};
use incidence_involutions::scalars::Field;

const STRATEGIES: [(&str, Strategy); 2] = [("sequential", Strategy::Sequential), ("parallel", Strategy::Parallel)];

fn chain_flip(n: usize) -> PosetMap {
    PosetMap::involution(Arc::new(Poset::chain(n)), (0..n).rev().collect()).unwrap()
}

fn enumeration(c: &mut Criterion) {
    let lambda = chain_flip(4);
    let field = Field::prime(5).unwrap();
    let mut g = c.benchmark_group("enumerate_involutions");
    for (name, s) in STRATEGIES {
        g.bench_function(BenchmarkId::new(name, "chain4/F5"), |b| {
            b.iter(|| enumerate_involutions_over(&lambda, field, 1_000_000, s).unwrap())
        });
    }
    g.finish();
}

fn classes(c: &mut Criterion) {
    let lambda = chain_flip(4);
    let field = Field::prime(3).unwrap();
    let mut g = c.benchmark_group("inner_classes");
    for (name, s) in STRATEGIES {
        g.bench_function(BenchmarkId::new(name, "chain4/F3"), |b| {
            b.iter(|| inner_classes(&lambda, field, 1_000_000, s).unwrap())
        });
    }
    g.finish();
}

fn oracle(c: &mut Criterion) {
    let lambda = chain_flip(4);
    let field = Field::prime(5).unwrap();
    let all = enumerate_involutions_over(&lambda, field, 1_000_000, Strategy::Sequential).unwrap();
    // The last descriptor is typically far from the first, so the search runs long.
    let (rho, eta) = (&all[0], all.last().unwrap());
    let mut g = c.benchmark_group("inner_equivalent_oracle");
    for (name, s) in STRATEGIES {
        g.bench_function(BenchmarkId::new(name, "chain4/F5"), |b| {
            b.iter(|| inner_equivalent_oracle(rho, eta, 1_000_000, s).unwrap())
        });
    }
    g.finish();
}

fn battery(c: &mut Criterion) {
    let p = Arc::new(Poset::diamond());
    let field = Field::prime(3).unwrap();
    let mut g = c.benchmark_group("verify_battery");
    g.sample_size(10);
    for (name, s) in STRATEGIES {
        g.bench_function(BenchmarkId::new(name, "diamond/F3"), |b| {
            b.iter(|| verify_battery(&p, field, Bounds::default(), s).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, enumeration, classes, oracle, battery);
criterion_main!(benches);
