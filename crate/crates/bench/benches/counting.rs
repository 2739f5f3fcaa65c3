use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use nivat_bench::corpus;
use nivat_core::balanced::find_balanced_set;
use nivat_core::complexity::rect_complexity;
use nivat_core::config::generators::thue_morse_2d;
use nivat_core::expansivity::census;
use nivat_core::extension::{find_generating_set, SearchMode, DEFAULT_BUDGET};
use nivat_core::periodicity::period_lattice;
use nivat_core::{DirectedLine, Direction};

fn rectangles(c: &mut Criterion) {
    let mut g = c.benchmark_group("rect_complexity");
    let inputs = [("mixed-4x3", corpus("mixed-4x3.cfg")), ("tm2d-5", thue_morse_2d(5))];
    for (name, eta) in &inputs {
        for n in [3usize, 6] {
            g.bench_with_input(BenchmarkId::new(*name, n), &n, |b, &n| {
                b.iter(|| rect_complexity(black_box(eta), n, 3).unwrap())
            });
        }
    }
    g.finish();
}

fn generating_sets(c: &mut Criterion) {
    let eta = corpus("diagonal-7.cfg");
    c.bench_function("find_generating_set/diagonal-7", |b| {
        b.iter(|| find_generating_set(black_box(&eta), 3, 3, SearchMode::Exhaustive, DEFAULT_BUDGET).unwrap())
    });
}

fn expansivity(c: &mut Criterion) {
    let eta = corpus("fibonacci-x.cfg");
    let mut g = c.benchmark_group("census");
    g.sample_size(10);
    g.bench_function("fibonacci-x", |b| b.iter(|| census(black_box(&eta), 6, 6, 6).unwrap()));
    g.finish();
}

fn balanced(c: &mut Criterion) {
    let eta = corpus("diagonal-7.cfg");
    let line = DirectedLine::new(Direction::new(1, 1).unwrap());
    c.bench_function("find_balanced_set/diagonal-7", |b| {
        b.iter(|| find_balanced_set(black_box(&eta), &line, 4).unwrap())
    });
}

fn lattices(c: &mut Criterion) {
    let eta = corpus("skew-5.cfg");
    c.bench_function("period_lattice/skew-5", |b| b.iter(|| period_lattice(black_box(&eta)).unwrap()));
}

criterion_group!(benches, rectangles, generating_sets, expansivity, balanced, lattices);
criterion_main!(benches);
