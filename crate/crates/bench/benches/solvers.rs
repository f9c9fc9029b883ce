use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use dnlab_core::elliptic::{smallest_eigenvalue, solve_linear, solve_semilinear, NewtonOptions};
use dnlab_core::radial::{shoot, solve_radial_bvp, BvpOptions};
use dnlab_core::{BoundaryData, Field, Grid, Nonlinearity, Profile};

fn linear(c: &mut Criterion) {
    let mut group = c.benchmark_group("solve_linear");
    for n in [33, 65, 129] {
        let g = Grid::unit_square(n).unwrap();
        let q = Field::from_fn(&g, |x, y| 1.0 + x * y);
        let data = BoundaryData::from_fn(&g, |x, y| x * x - y);
        let rhs = Field::zeros(&g);
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| solve_linear(&g, &q, &data, &rhs).unwrap())
        });
    }
    group.finish();
}

fn newton(c: &mut Criterion) {
    let mut group = c.benchmark_group("newton_cubic");
    group.sample_size(20);
    for n in [33, 65] {
        let g = Grid::unit_square(n).unwrap();
        let data = BoundaryData::constant(&g, 10.0);
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| solve_semilinear(&g, &Nonlinearity::cubic(), &data, &NewtonOptions::default()).unwrap())
        });
    }
    group.finish();
}

fn eigen(c: &mut Criterion) {
    let g = Grid::unit_square(65).unwrap();
    let q = Field::zeros(&g);
    c.bench_function("smallest_eigenvalue/65", |b| b.iter(|| smallest_eigenvalue(&g, &q).unwrap()));
}

fn radial(c: &mut Criterion) {
    let cubic = Profile::monomial(3);
    c.bench_function("shoot/cubic", |b| b.iter(|| shoot(&cubic, 0.5, 2, 1.0, 201).unwrap()));
    let opts = BvpOptions { nodes: 201, ..BvpOptions::default() };
    c.bench_function("radial_bvp/cubic/1e3", |b| {
        b.iter(|| solve_radial_bvp(&cubic, 1e3, 2, 1.0, opts).unwrap())
    });
}

criterion_group!(benches, linear, newton, eigen, radial);
criterion_main!(benches);
