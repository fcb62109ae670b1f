use broccoli_core::invariant::{gs_invariant, InvariantQuery};
use broccoli_core::oracle::{exhaustive_enumerator, psi_limit_table, rectangle_degree};
use broccoli_core::Degree;
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn rectangle(c: &mut Criterion) {
    let mut g = c.benchmark_group("rectangle");
    g.sample_size(10);
    for nv in [0usize, 2, 5] {
        let q = InvariantQuery::with_nv(rectangle_degree(), 1, nv).unwrap();
        g.bench_with_input(BenchmarkId::new("paths", nv), &q, |b, q| b.iter(|| gs_invariant(q).unwrap()));
    }
    let q = InvariantQuery::with_nv(rectangle_degree(), 1, 2).unwrap();
    g.bench_function("exhaustive/2", |b| b.iter(|| exhaustive_enumerator(&q).unwrap()));
    g.finish();
}

fn cubic(c: &mut Criterion) {
    let q = InvariantQuery::with_nv(Degree::plane(3), 0, 1).unwrap();
    c.bench_function("plane cubic nv=1", |b| b.iter(|| gs_invariant(&q).unwrap()));
}

fn weights(c: &mut Criterion) {
    let mut g = c.benchmark_group("weights");
    g.sample_size(10);
    g.bench_function("limit table 4x4", |b| b.iter(|| psi_limit_table(4, 4).unwrap()));
    g.finish();
}

criterion_group!(benches, rectangle, cubic, weights);
criterion_main!(benches);
