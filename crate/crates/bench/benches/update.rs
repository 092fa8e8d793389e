use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use epikit::{bisimulation_partition, product_update, translate, EvalContext};
use epikit_bench::{dynamic_workload, eight_world, formula_workload, product_workload};

fn product(c: &mut Criterion) {
    let mut group = c.benchmark_group("product_update");
    for worlds in [4, 16, 64] {
        let (m, a) = product_workload(worlds, 1);
        group.bench_with_input(BenchmarkId::from_parameter(worlds), &worlds, |b, _| {
            b.iter(|| product_update(black_box(&m), black_box(&a)))
        });
    }
    group.finish();
}

fn update_plus(c: &mut Criterion) {
    let mut group = c.benchmark_group("update_plus");
    for worlds in [4, 16, 64] {
        let d = dynamic_workload(worlds, 2);
        group.bench_with_input(BenchmarkId::from_parameter(worlds), &worlds, |b, _| {
            b.iter(|| black_box(&d).update_plus())
        });
    }
    group.finish();
}

fn evaluation(c: &mut Criterion) {
    let d = dynamic_workload(16, 3);
    let formulas = formula_workload(&d, 32, 4);
    c.bench_function("truth_set/16 worlds, 32 formulas", |b| {
        b.iter(|| {
            let mut ctx = EvalContext::new(d.clone());
            for phi in &formulas {
                black_box(ctx.truth_set(phi).ok());
            }
        })
    });
    let m2 = eight_world();
    let phi = epikit::parse_formula("[sp] (!K_b K_a p & !K_b !K_a p)", m2.sig()).expect("parses");
    c.bench_function("truth_set/eight worlds", |b| {
        b.iter(|| EvalContext::new(m2.clone()).truth_set(black_box(&phi)))
    });
}

fn reduction(c: &mut Criterion) {
    let d = dynamic_workload(8, 5);
    let formulas = formula_workload(&d, 32, 6);
    c.bench_function("translate/32 formulas", |b| {
        b.iter(|| {
            for phi in &formulas {
                black_box(translate(phi, d.sig()).ok());
            }
        })
    });
}

fn bisimulation(c: &mut Criterion) {
    let (m, a) = product_workload(64, 7);
    let product = product_update(&m, &a).expect("nonempty product");
    c.bench_function("bisimulation_partition/product of 64 worlds", |b| {
        b.iter(|| bisimulation_partition(black_box(&product)))
    });
}

criterion_group!(
    benches,
    product,
    update_plus,
    evaluation,
    reduction,
    bisimulation
);
criterion_main!(benches);
