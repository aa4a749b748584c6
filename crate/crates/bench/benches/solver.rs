use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use stressforge::fea::{solve_case_with, StiffnessSystem};
use stressforge::{element_stiffness, solve_case, Material};
use stressforge_bench::cantilever;

fn element(c: &mut Criterion) {
    let mat = Material::default();
    c.bench_function("element_stiffness", |b| {
        b.iter(|| element_stiffness(black_box(&mat), black_box(1.0)).unwrap())
    });
}

fn full_solve(c: &mut Criterion) {
    let mat = Material::default();
    let mut group = c.benchmark_group("solve_case");
    group.sample_size(10);
    for m in [32, 64] {
        let case = cantilever(m);
        group.bench_with_input(BenchmarkId::from_parameter(m), &case, |b, case| {
            b.iter(|| solve_case(case, &mat).unwrap())
        });
    }
    group.finish();
}

fn reused_factorization(c: &mut Criterion) {
    let mat = Material::default();
    let mut group = c.benchmark_group("solve_with_factorization");
    for m in [32, 64] {
        let case = cantilever(m);
        let factored = StiffnessSystem::assemble(&case.mesh, &mat, &case.constraints)
            .unwrap()
            .factorize()
            .unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(m), &case, |b, case| {
            b.iter(|| solve_case_with(&factored, case).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, element, full_solve, reused_factorization);
criterion_main!(benches);
