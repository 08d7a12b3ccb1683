use std::hint::black_box;

use chronoscale_bench::{func, mixed_scale};
use chronoscale_core::inequalities::{check, CheckConfig, Instance, TheoremId};
use chronoscale_core::{run_campaign, GenConfig, TimeScale};
use criterion::{criterion_group, criterion_main, Criterion};

fn checks(c: &mut Criterion) {
    let cfg = CheckConfig::default();
    let t = mixed_scale();
    let holder = Instance::new(TheoremId::Holder, func("x+1"), 3.0).with_g(func("exp(x/5)"));
    c.bench_function("check_holder_mixed", |b| b.iter(|| black_box(check(&t, 0.0, 10.0, &cfg, &holder).unwrap())));
    let lat = TimeScale::lattice(0.0, 3.0, 1.0).unwrap();
    let akk = Instance::new(TheoremId::Akkouchi, func("2*x+1"), 1.0);
    c.bench_function("check_akkouchi_lattice", |b| b.iter(|| black_box(check(&lat, 0.0, 3.0, &cfg, &akk).unwrap())));
    let unit = TimeScale::interval(0.0, 1.0).unwrap();
    let yq = Instance::new(TheoremId::YinQi, func("x/2"), 2.0);
    c.bench_function("check_yin_qi_dense", |b| b.iter(|| black_box(check(&unit, 0.0, 1.0, &cfg, &yq).unwrap())));
}

fn campaign(c: &mut Criterion) {
    let mut g = c.benchmark_group("campaign_100_trials");
    g.sample_size(10);
    for th in [TheoremId::Holder, TheoremId::Qi, TheoremId::Akkouchi] {
        g.bench_function(th.name(), |b| b.iter(|| black_box(run_campaign(th, &GenConfig::with_seed(7), 100).unwrap())));
    }
    g.finish();
}

criterion_group!(benches, checks, campaign);
criterion_main!(benches);
