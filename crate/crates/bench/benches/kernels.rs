use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use nehari_core::optimizer::{nmrag_step, rag_step, rsd_step, MomentumState, NonmonotoneState};
use nehari_core::scenarios::{example1, gaussian_initial};
use nehari_core::spectral::{dst2, idst2};
use nehari_core::{Grid, SolverOptions};

fn transforms(c: &mut Criterion) {
    let mut group = c.benchmark_group("dst2");
    for m in [32, 64, 128, 256] {
        let grid = Grid::new(1.0, m).unwrap();
        let f = grid.sample(|x, y| (3.0 * x).sin() * (1.0 - y * y) + x * y);
        group.bench_with_input(BenchmarkId::new("forward", m), &f, |b, f| b.iter(|| dst2(black_box(f))));
        let c = dst2(&f);
        group.bench_with_input(BenchmarkId::new("inverse", m), &c, |b, c| b.iter(|| idst2(black_box(c))));
    }
    group.finish();
}

fn gradients(c: &mut Criterion) {
    let mut group = c.benchmark_group("gradient");
    for m in [64, 128] {
        let p = example1(8.0).with_subdivisions(m).build().unwrap();
        let u = gaussian_initial(&p).unwrap();
        group.bench_with_input(BenchmarkId::new("riemannian", m), &u, |b, u| {
            b.iter(|| p.riemannian_gradient(black_box(u)).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("residual", m), &u, |b, u| {
            b.iter(|| p.residual(black_box(u)).unwrap())
        });
    }
    group.finish();
}

fn iterations(c: &mut Criterion) {
    let p = example1(8.0).build().unwrap();
    let u0 = gaussian_initial(&p).unwrap();
    let u1 = rsd_step(&p, &u0, 0.1).unwrap();
    let opts = SolverOptions::default();
    let mom = MomentumState::initial().next().next();
    let nm = NonmonotoneState::new(p.energy(&u0).unwrap());

    let mut group = c.benchmark_group("iteration");
    group.bench_function("rsd", |b| b.iter(|| rsd_step(&p, black_box(&u1), 0.1).unwrap()));
    group.bench_function("rag", |b| b.iter(|| rag_step(&p, black_box(&u1), &u0, mom, 0.1).unwrap()));
    group.bench_function("nmrag", |b| {
        b.iter(|| nmrag_step(&p, black_box(&u1), &u0, mom, nm, &opts).unwrap())
    });
    group.finish();
}

criterion_group!(benches, transforms, gradients, iterations);
criterion_main!(benches);
