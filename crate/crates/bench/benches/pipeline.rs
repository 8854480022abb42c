use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use realtile::algebra::{char_poly, factor_over_integers, smith_normal_form};
use realtile::realization::{periodic_fibers, sampler, Kernel, TilingPoint};
use realtile::report::Pipeline;
use realtile::{example, IntMatrix, IntPolynomial};

fn algebra(c: &mut Criterion) {
    let m = IntMatrix::from_rows(&[
        vec![4, -2, 7, 0, 1, 3],
        vec![1, 5, -3, 2, 0, -1],
        vec![0, 2, 6, -4, 3, 2],
        vec![-3, 1, 0, 5, 2, 7],
        vec![2, 0, 1, 1, -6, 4],
        vec![5, 3, -2, 0, 1, 1],
    ]);
    c.bench_function("snf-6x6", |b| b.iter(|| smith_normal_form(black_box(&m))));
    c.bench_function("charpoly-6x6", |b| b.iter(|| char_poly(black_box(&m))));

    // (t^2 - t - 1)^2 (t^3 - t - 1)(t - 2)
    let golden = IntPolynomial::from_i64(&[-1, -1, 1]);
    let plastic = IntPolynomial::from_i64(&[-1, -1, 0, 1]);
    let p = &(&(&golden * &golden) * &plastic) * &IntPolynomial::from_i64(&[-2, 1]);
    c.bench_function("factor-degree-8", |b| b.iter(|| factor_over_integers(black_box(&p))));
}

fn complexes(c: &mut Criterion) {
    for name in ["fibonacci", "example-2-8", "example-2-9", "final-example"] {
        let s = example(name).unwrap().substitution();
        c.bench_function(&format!("pipeline-{name}"), |b| b.iter(|| Pipeline::new(black_box(&s), true, 1e-9)));
    }
}

fn realization(c: &mut Criterion) {
    for (name, kernel) in [("fibonacci", Kernel::Lambda), ("example-2-9", Kernel::Hyp)] {
        let s = example(name).unwrap().substitution();
        let r = Pipeline::new(&s, true, 1e-9).unwrap().realizer(kernel).unwrap();
        let mut rng = sampler(1);
        c.bench_function(&format!("realize-depth50-{name}"), |b| {
            b.iter_batched(|| TilingPoint::sample(&r, 58, &mut rng), |p| r.realize(&p, 50), BatchSize::SmallInput)
        });
        if name == "fibonacci" {
            c.bench_function("fibers-fibonacci-m2", |b| b.iter(|| periodic_fibers(&r, &s, 2, 50)));
        }
    }
}

criterion_group!(benches, algebra, complexes, realization);
criterion_main!(benches);
