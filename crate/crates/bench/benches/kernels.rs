use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use osgm::dynamics::{self, MapKind};
use osgm::feedback::{hb_feedback, hypergrad_feedback};
use osgm::harness::parse_libsvm;
use osgm::learners::ogd_step;
use osgm::optimizers::{run, Algorithm, RunConfig};
use osgm::{EvalPoint, HBParams, HBPoint, LearnerConfig, Parametrization, Stepsize};
use osgm_bench::*;
use std::hint::black_box;

fn feedback(c: &mut Criterion) {
    let mut g = c.benchmark_group("feedback");
    for n in [10, 100] {
        let obj = quadratic_objective(n, 100.0);
        let l = obj.smoothness();
        let at = EvalPoint::new(&obj, point(n, 1));
        let p = Stepsize::scaled_identity(Parametrization::Diagonal, n, 1.0 / l);
        g.bench_with_input(BenchmarkId::new("hypergradient", n), &n, |b, _| b.iter(|| hypergrad_feedback(&obj, &at, black_box(&p)).unwrap()));
        let z = HBPoint::new(&obj, &hb_state(n, 2));
        let hb = HBParams::defaults(l);
        g.bench_with_input(BenchmarkId::new("heavy-ball", n), &n, |b, _| b.iter(|| hb_feedback(&obj, &z, black_box(&p), 0.5, &hb).unwrap()));
        let fb = hypergrad_feedback(&obj, &at, &p).unwrap().feedback;
        let lc = LearnerConfig::unbounded(1.0 / l, 1.0 / l);
        g.bench_with_input(BenchmarkId::new("ogd-step", n), &n, |b, _| b.iter(|| ogd_step(black_box(&p), 0.5, &fb, &lc)));
    }
    g.finish();
}

fn methods(c: &mut Criterion) {
    let mut g = c.benchmark_group("methods");
    g.sample_size(20);
    let obj = quadratic_objective(50, 100.0);
    for alg in [Algorithm::Gd, Algorithm::GdHb, Algorithm::OsgmHLookahead, Algorithm::OsgmBest] {
        let cfg = RunConfig::new(alg).with_budget(200).with_tol(1e-300);
        g.bench_function(alg.name(), |b| b.iter(|| run(&obj, black_box(&cfg)).unwrap()));
    }
    g.finish();
}

fn dynamics_and_parsing(c: &mut Criterion) {
    c.bench_function("orbit-spectral-radius", |b| b.iter(|| dynamics::orbit_spectral_radius(MapKind::Osgm, black_box(10.0), 1.0, 4).unwrap()));
    let text = libsvm_text(20);
    c.bench_function("parse-libsvm", |b| b.iter(|| parse_libsvm(black_box(&text)).unwrap()));
}

criterion_group!(benches, feedback, methods, dynamics_and_parsing);
criterion_main!(benches);
