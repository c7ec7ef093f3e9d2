use std::hint::black_box;

use biwave_bench::{data, point};
use biwave_core::*;
use criterion::{criterion_group, criterion_main, Criterion};

fn solvers(c: &mut Criterion) {
    let mut group = c.benchmark_group("solver point evaluation");
    for n in [1usize, 2, 3] {
        let p = make_params(1.0, 0.5, n).unwrap();
        let u = solve_homogeneous(data(n), p, SolverConfig::default()).unwrap();
        let x = point(n);
        group.bench_function(format!("n={n}"), |b| b.iter(|| u.eval(black_box(&x), black_box(1.3)).unwrap()));
    }
    group.finish();
}

fn oracle(c: &mut Criterion) {
    let p = make_params(1.0, 0.5, 3).unwrap();
    let o = oracle_solution(&data(3), &p).unwrap();
    let x = point(3);
    c.bench_function("oracle n=3", |b| b.iter(|| o.eval(black_box(&x), black_box(1.3)).unwrap()));
}

fn rules(c: &mut Criterion) {
    c.bench_function("gauss-legendre 64", |b| b.iter(|| gauss_legendre(black_box(64)).unwrap()));
    c.bench_function("sphere rule n=3 level 32", |b| {
        b.iter(|| sphere_surface_rule(black_box(3), black_box(32)).unwrap())
    });
}

fn duhamel(c: &mut Criterion) {
    let p = make_params(1.0, 0.5, 1).unwrap();
    let f = ForcingField::separable(
        1,
        vec![ForcingTerm {
            space: TrigPoly::cos(&[1]).unwrap(),
            time: TimeProfile::new(|t| (2.0 * t).cos()),
        }],
    )
    .unwrap();
    let u = solve_nonhomogeneous(InitialData::zero(1), f, p, DuhamelConfig::default()).unwrap();
    c.bench_function("duhamel n=1", |b| b.iter(|| u.eval(black_box(&[0.4]), black_box(1.5)).unwrap()));
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(20);
    targets = solvers, oracle, rules, duhamel
}
criterion_main!(benches);
