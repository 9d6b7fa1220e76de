use criterion::{criterion_group, criterion_main, Criterion};

use apnforge_core::ddt::projective_point_count_with;
use apnforge_core::phi::{build_phi, gold_product_with};
use apnforge_core::screen::exhaustive_cubic_search_with;
use apnforge_core::{FieldCtx, Strategy, UniPoly};

const STRATEGIES: [(&str, Strategy); 2] = [
    ("sequential", Strategy::Sequential),
    ("parallel", Strategy::Parallel),
];

fn points(c: &mut Criterion) {
    let mut group = c.benchmark_group("projective_point_count");
    group.sample_size(10);
    let ctx = FieldCtx::new(6).unwrap();
    let f = UniPoly::parse("x^9+x^7", ctx).unwrap();
    for (name, strategy) in STRATEGIES {
        group.bench_function(name, |b| {
            b.iter(|| projective_point_count_with(&f, &ctx, strategy).unwrap())
        });
    }
    group.finish();
}

fn gold(c: &mut Criterion) {
    let mut group = c.benchmark_group("gold_product");
    group.sample_size(10);
    let ctx = FieldCtx::new(6).unwrap();
    for (name, strategy) in STRATEGIES {
        group.bench_function(name, |b| b.iter(|| gold_product_with(6, ctx, strategy).unwrap()));
    }
    group.finish();
}

fn cubic(c: &mut Criterion) {
    let mut group = c.benchmark_group("exhaustive_cubic_search");
    group.sample_size(10);
    let ctx = FieldCtx::new(1).unwrap();
    let phi = build_phi(&UniPoly::parse("x^12+x^3", ctx).unwrap());
    for (name, strategy) in STRATEGIES {
        group.bench_function(name, |b| {
            b.iter(|| exhaustive_cubic_search_with(&phi, &ctx, strategy).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, points, gold, cubic);
criterion_main!(benches);
