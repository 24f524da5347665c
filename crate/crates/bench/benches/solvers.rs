use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use trilevel::oracle::integrate_eta_direct;
use trilevel::propagator::{exp_generator, Generator};
use trilevel::{preset, rho_to_eta, solve_mu, Propagator, C64};

fn riccati(c: &mut Criterion) {
    let mut group = c.benchmark_group("riccati_first_chart");
    for name in ["fig1", "fig4", "fig10"] {
        let cfg = preset(name).unwrap().config;
        group.bench_with_input(BenchmarkId::from_parameter(name), &cfg, |b, cfg| {
            b.iter(|| solve_mu(black_box(cfg), 1.0, 1e-10))
        });
    }
    group.finish();
}

fn generators(c: &mut Criterion) {
    let z = C64::new(0.3, -1.2);
    let mut group = c.benchmark_group("exp_generator");
    for (label, g) in [("plus", Generator::Plus), ("minus", Generator::Minus), ("z", Generator::Z)] {
        group.bench_function(label, |b| b.iter(|| exp_generator(black_box(z), g)));
    }
    group.finish();
}

fn product_vs_oracle(c: &mut Criterion) {
    let p = preset("fig3").unwrap();
    let rho0 = p.initial_state.density();
    let eta0 = rho_to_eta(&rho0);
    let mut group = c.benchmark_group("fig3_t100");
    group.sample_size(10);
    group.bench_function("product", |b| {
        b.iter(|| Propagator::new(1e-10).run(&p.config, &rho0, 100.0, 0.1).unwrap())
    });
    group.bench_function("direct_eta", |b| {
        b.iter(|| integrate_eta_direct(&p.config, &eta0, 100.0, 0.1, 1e-10).unwrap())
    });
    group.finish();
}

criterion_group!(benches, riccati, generators, product_vs_oracle);
criterion_main!(benches);
