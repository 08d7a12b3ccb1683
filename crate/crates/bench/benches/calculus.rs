use std::hint::black_box;

use chronoscale_bench::{func, lattice, mixed_scale};
use chronoscale_core::calculus::{delta_derivative, delta_integral, fundamental_theorem_check};
use chronoscale_core::parse;
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn scale_ops(c: &mut Criterion) {
    let t = mixed_scale();
    let pts = t.scale_points(0.05);
    c.bench_function("sigma_rho_mu_sweep", |b| {
        b.iter(|| {
            let mut acc = 0.0;
            for &p in &pts {
                acc += t.sigma(p).unwrap() - t.rho(p).unwrap() + t.mu(p).unwrap();
            }
            black_box(acc)
        })
    });
    c.bench_function("restrict", |b| b.iter(|| black_box(t.restrict(0.5, 8.0).unwrap())));
}

fn derivative(c: &mut Criterion) {
    let t = mixed_scale();
    let f = func("exp(x/3)*sin(x)");
    c.bench_function("delta_derivative_dense", |b| {
        b.iter(|| black_box(delta_derivative(&f, &t, black_box(0.4), 1e-9).unwrap()))
    });
    c.bench_function("delta_derivative_scattered", |b| {
        b.iter(|| black_box(delta_derivative(&f, &t, black_box(3.0), 1e-9).unwrap()))
    });
}

fn integral(c: &mut Criterion) {
    let f = func("x^2+1");
    let mut g = c.benchmark_group("delta_integral_lattice");
    for n in [10usize, 100, 1000] {
        let t = lattice(n);
        g.bench_with_input(BenchmarkId::from_parameter(n), &t, |b, t| {
            b.iter(|| black_box(delta_integral(&f, t, 0.0, n as f64, 1e-10).unwrap()))
        });
    }
    g.finish();
    let t = mixed_scale();
    let h = func("exp(x/3)*sin(x)");
    c.bench_function("delta_integral_mixed", |b| {
        b.iter(|| black_box(delta_integral(&h, &t, 0.0, 10.0, 1e-10).unwrap()))
    });
    c.bench_function("fundamental_theorem_mixed", |b| {
        b.iter(|| black_box(fundamental_theorem_check(&h, &t, 0.0, 7.0, 1e-9).unwrap()))
    });
}

fn parser(c: &mut Criterion) {
    c.bench_function("parse", |b| b.iter(|| black_box(parse(black_box("exp(-x^2/2)*cos(3*x) + ln(1+x^2)")).unwrap())));
}

criterion_group!(benches, scale_ops, derivative, integral, parser);
criterion_main!(benches);
