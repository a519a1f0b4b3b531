use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use semiring_forge::enumerate::{enumerate, multiplications, EnumerationOptions};
use semiring_forge::exec::Exec;
use semiring_forge::order::Semilattice;
use semiring_forge::pipeline::{corpus, roundtrip_all};

const STRATEGIES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn bench_multiplications(c: &mut Criterion) {
    let mut g = c.benchmark_group("multiplications");
    for (name, l) in [("chain5", Semilattice::chain(5)), ("flat4", Semilattice::flat(4))] {
        for (label, exec) in STRATEGIES {
            g.bench_with_input(BenchmarkId::new(label, name), &l, |b, l| {
                b.iter(|| multiplications(black_box(l), exec))
            });
        }
    }
    g.finish();
}

fn bench_enumerate(c: &mut Criterion) {
    let mut g = c.benchmark_group("enumerate_simple_5");
    g.sample_size(10);
    for (label, exec) in STRATEGIES {
        g.bench_function(label, |b| {
            b.iter(|| {
                let mut opts = EnumerationOptions::simple(5);
                opts.exec = exec;
                enumerate(black_box(&opts)).unwrap()
            })
        });
    }
    g.finish();
}

fn bench_roundtrip(c: &mut Criterion) {
    let items = corpus(5, Exec::Parallel, 0).unwrap();
    let mut g = c.benchmark_group("roundtrip_corpus_5");
    g.sample_size(10);
    for (label, exec) in STRATEGIES {
        g.bench_function(label, |b| b.iter(|| roundtrip_all(black_box(&items), exec)));
    }
    g.finish();
}

criterion_group!(benches, bench_multiplications, bench_enumerate, bench_roundtrip);
criterion_main!(benches);
