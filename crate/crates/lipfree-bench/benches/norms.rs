use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use lipfree_bench::{cloud, dense_vector, shortest_path_metric, BENCH_SEED};
use lipfree_core::algebra::{characters, AlgebraContext};
use lipfree_core::free::{dual_norm, free_norm};
use lipfree_core::generate::{generate_space, SpaceKind};
use lipfree_core::{BoundedSpace, WeightFunction};
use std::hint::black_box;

fn bench_free_norm(c: &mut Criterion) {
    let mut group = c.benchmark_group("free_norm");
    for n in [20, 50, 100, 200] {
        let space = cloud(n);
        let gamma = dense_vector(&space);
        group.bench_with_input(BenchmarkId::from_parameter(n), &gamma, |b, gamma| {
            b.iter(|| black_box(free_norm(gamma)));
        });
    }
    group.finish();
}

fn bench_dual_norm(c: &mut Criterion) {
    let mut group = c.benchmark_group("dual_norm");
    for n in [10, 20, 40] {
        let space = shortest_path_metric(n);
        let gamma = dense_vector(&space);
        group.bench_with_input(BenchmarkId::from_parameter(n), &gamma, |b, gamma| {
            b.iter(|| black_box(dual_norm(gamma).expect("lp")));
        });
    }
    group.finish();
}

fn bench_bounded_transform(c: &mut Criterion) {
    let mut group = c.benchmark_group("bounded_transform");
    let alpha = WeightFunction::shifted();
    for n in [10, 20, 40] {
        let space = cloud(n);
        group.bench_with_input(BenchmarkId::from_parameter(n), &space, |b, space| {
            b.iter(|| black_box(BoundedSpace::build(space, &alpha).expect("transform")));
        });
    }
    group.finish();
}

fn bench_operator_norm(c: &mut Criterion) {
    let mut group = c.benchmark_group("iso_operator_norms");
    let alpha = WeightFunction::identity();
    for n in [10, 20] {
        let space = cloud(n);
        let b_space = BoundedSpace::build(&space, &alpha).expect("transform");
        group.bench_with_input(BenchmarkId::from_parameter(n), &b_space, |b, bs| {
            b.iter(|| {
                let p = bs.p_free();
                let q = bs.q_free();
                black_box(p.operator_norm() * q.operator_norm())
            });
        });
    }
    group.finish();
}

fn bench_characters(c: &mut Criterion) {
    let space = generate_space(SpaceKind::EuclideanCloud, 30, BENCH_SEED).expect("space");
    let ctx = AlgebraContext::new(&space, &WeightFunction::shifted());
    c.bench_function("characters/30", |b| {
        b.iter(|| black_box(characters(&ctx).expect("characters")));
    });
}

criterion_group!(
    benches,
    bench_free_norm,
    bench_dual_norm,
    bench_bounded_transform,
    bench_operator_norm,
    bench_characters
);
criterion_main!(benches);
