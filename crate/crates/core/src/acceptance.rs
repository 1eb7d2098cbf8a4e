//! The fourteen acceptance checks, each returning a pass/fail verdict with a
//! one-line detail.  Used by the `acceptance` test target and `osgm check`.

use crate::dynamics::{self, MapKind};
use crate::feedback::{hb_feedback, hb_potential, hypergrad_feedback, prox_feedback_linearized_grad, regularized_feedback};
use crate::harness::{benchmark_algorithms, parse_libsvm, random_dataset, run_experiment, serialize_libsvm, ExperimentConfig, ProblemSpec};
use crate::optimizers::{
    agd_contraction_factor, agd_potential_trace, comparator_feedback, gradient_envelope, linear_rate_certificate, run, run_composite, Algorithm,
    RunConfig,
};
use crate::problems::{make_lasso, make_logistic, make_rosenbrock, rosenbrock_start, CompositeObjective, LabeledDesign, Objective, QuadraticProblem};
use crate::{EvalPoint, HBParams, HBPoint, HBState, Matrix, OsgmError, Parametrization, Result, Stepsize, Vector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use std::fmt;
use std::time::Instant;

#[derive(Clone, Debug, PartialEq)]
pub struct Verdict {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "[{tag}] {:>2} {:<28} {:>8.3}s  {}", self.id, self.name, self.seconds, self.detail)
    }
}

type Check = fn() -> Result<(bool, String)>;

pub const CRITERIA: [(usize, &str, Check); 14] = [
    (1, "rate-certificate", rate_certificate),
    (2, "spectral-radii", spectral_radii),
    (3, "period-two-orbit", period_two_orbit),
    (4, "heavy-ball-potential", heavy_ball_potential),
    (5, "hindsight-feedback", hindsight_feedback),
    (6, "feedback-gradients", feedback_gradients),
    (7, "nonconvex-envelope", nonconvex_envelope),
    (8, "prox-envelope", prox_envelope),
    (9, "agd-potential", agd_potential),
    (10, "spike", spike),
    (11, "hdm-stabilization", hdm_stabilization),
    (12, "benchmark-ordering", benchmark_ordering),
    (13, "adagrad-regret", adagrad_regret_check),
    (14, "parser", parser),
];

/// Criteria that fail with the documented defaults, with the reason.
pub const KNOWN_FAILURES: [(usize, &str); 2] = [
    (4, "the stated decrease does not hold for arbitrary (x, x⁻): with ∇f = 0 along x − x⁻ it needs (1−αL)(1−β²) ≥ 2(1−αL−β²)"),
    (12, "with ω = 3L the learned stepsize settles near 1/(4L), so the lookahead method trails plain baselines"),
];

pub fn known_failure(id: usize) -> Option<&'static str> {
    KNOWN_FAILURES.iter().find(|k| k.0 == id).map(|k| k.1)
}

/// Runs criterion `id`; errors count as failures.
pub fn run_criterion(id: usize) -> Result<Verdict> {
    let (_, name, check) = CRITERIA.iter().find(|c| c.0 == id).ok_or_else(|| OsgmError::InvalidInput(format!("no acceptance criterion {id}")))?;
    let start = Instant::now();
    let (passed, detail) = match check() {
        Ok(v) => v,
        Err(e) => (false, format!("error: {e}")),
    };
    Ok(Verdict { id, name, passed, detail, seconds: start.elapsed().as_secs_f64() })
}

pub fn run_all() -> Vec<Verdict> {
    CRITERIA.iter().map(|c| run_criterion(c.0).expect("listed criterion")).collect()
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gauss(rng: &mut ChaCha8Rng, n: usize) -> Vector {
    Vector::from_fn(n, |_, _| rng.sample(StandardNormal))
}

fn rate_certificate() -> Result<(bool, String)> {
    let start = Instant::now();
    let q = QuadraticProblem::random(50, 100.0, true, &mut rng(101))?;
    let obj = q.objective();
    let l = obj.smoothness();
    let cfg = RunConfig::new(Algorithm::OsgmBest)
        .with_p0(Stepsize::scaled_identity(Parametrization::Diagonal, 50, 1.0 / (4.0 * l)))
        .with_beta0(0.5)
        .with_hb(HBParams::new(3.0 * l, 16.0 * l * l, l)?)
        .with_eta(1.0 / (2.0 * l))
        .with_tol(1e-300)
        .with_budget(u64::MAX)
        .with_max_iters(2000)
        .with_seed(7);
    let t = run(&obj, &cfg)?;
    let rep = linear_rate_certificate(&t, q.fstar(), 100.0);
    let secs = start.elapsed().as_secs_f64();
    let ok = rep.holds(1e-12, 0.0) && secs < 5.0 && !rep.horizons.is_empty();
    Ok((ok, format!("K = {}, worst ratio {:.3e}, {secs:.2}s", rep.horizons.len(), rep.worst_ratio())))
}

fn spectral_radii() -> Result<(bool, String)> {
    let start = Instant::now();
    let mut worst_osgm: f64 = 0.0;
    let mut max_hdm: f64 = 0.0;
    for kappa in [2.0, 4.0, 10.0, 100.0] {
        let o = dynamics::orbit_spectral_radius(MapKind::Osgm, kappa, 1.0, 2)?;
        worst_osgm = worst_osgm.max((o - dynamics::osgm_orbit_radius(kappa)).abs());
        max_hdm = max_hdm.max(dynamics::orbit_spectral_radius(MapKind::Hdm, kappa, 1.0, 2)?);
    }
    let secs = start.elapsed().as_secs_f64();
    let ok = worst_osgm <= 1e-6 && max_hdm < 1.0 - 1e-6 && secs < 1.0;
    Ok((ok, format!("OSGM radius error {worst_osgm:.1e}, largest HDM radius {max_hdm:.6}")))
}

fn period_two_orbit() -> Result<(bool, String)> {
    let mut r = rng(3);
    let mut pairs = vec![(4.0, 1.0)];
    for _ in 0..10 {
        let mu: f64 = r.random_range(0.1..5.0);
        pairs.push((mu * r.random_range(1.5..200.0), mu));
    }
    let mut worst: f64 = 0.0;
    for &(l, mu) in &pairs {
        let lam = dynamics::orbit_spectrum(l, mu, 2)?;
        let (s1, _) = dynamics::orbit(l, mu, 2, 1.0)?;
        let eta = 1.0 / l;
        let h = dynamics::step_hdm(&s1, &lam, eta)?;
        let o = dynamics::step_osgm(&s1, &lam, eta)?;
        worst = worst.max(h.distance(&o));
        for kind in [MapKind::Hdm, MapKind::Osgm] {
            let back = dynamics::step(kind, &dynamics::step(kind, &s1, &lam, eta)?, &lam, eta)?;
            worst = worst.max(back.distance(&s1));
        }
    }
    Ok((worst <= 1e-12, format!("{} pairs, worst deviation {worst:.1e}", pairs.len())))
}

fn heavy_ball_potential() -> Result<(bool, String)> {
    let mut r = rng(4);
    let mut worst = f64::NEG_INFINITY;
    let mut violated = 0;
    for _ in 0..1000 {
        let n = r.random_range(2..8);
        let kappa = 10f64.powf(r.random_range(0.0..3.0));
        let q = QuadraticProblem::random(n, kappa, true, &mut r)?;
        let obj = q.objective();
        let l = obj.smoothness();
        let alpha = r.random_range(0.01..=1.0) / l;
        let beta = r.random_range(0.0..=1.0) * (1.0 - alpha * l).max(0.0).sqrt();
        let omega = (1.0 - alpha * l) / (2.0 * alpha);
        let z = HBState { z1: gauss(&mut r, n), z2: gauss(&mut r, n) };
        let pt = HBPoint::new(&obj, &z);
        let params = HBParams { omega, tau: 2.0 * l * (omega + l) };
        let Ok(fb) = hb_feedback(&obj, &pt, &Stepsize::Scalar(alpha), beta, &params) else { continue };
        let before = hb_potential(&obj, &z, omega);
        let after = hb_potential(&obj, &HBState { z1: fb.proposal.x.clone(), z2: z.z1.clone() }, omega);
        let d = (&z.z1 - &z.z2).norm_squared();
        let decrease = 0.5 * alpha * (pt.z1.grad_norm_sq() + (1.0 - alpha * l - beta * beta) / (alpha * alpha) * d);
        let violation = (after - (before - decrease)) / before.max(1.0);
        worst = worst.max(violation);
        violated += usize::from(violation > 1e-10);
    }
    Ok((worst <= 1e-10, format!("violated in {violated}/1000 cases, worst scaled violation {worst:.2e}")))
}

fn hindsight_feedback() -> Result<(bool, String)> {
    let mut worst = f64::NEG_INFINITY;
    let mut checked = 0;
    for spec in crate::harness::synthetic_suite(0) {
        let inst = crate::harness::generate(&spec)?;
        let obj = inst.problem.smooth();
        let l = obj.smoothness();
        let n = obj.dim();
        let t = run(obj, &RunConfig::new(Algorithm::OsgmBest).with_seed(11).recording_iterates())?;
        let p = Stepsize::scaled_identity(Parametrization::Diagonal, n, 1.0 / (4.0 * l));
        let hb = HBParams::defaults(l);
        for rec in &t.records {
            let (Some(x), Some(z2)) = (&rec.x, &rec.z2) else { continue };
            let h = match comparator_feedback(obj, x, z2, &p, 0.5, &hb) {
                Ok(h) => h,
                Err(OsgmError::StationaryPoint(_)) => continue,
                Err(e) => return Err(e),
            };
            worst = worst.max((h + 1.0 / (8.0 * l)) * l);
            checked += 1;
        }
    }
    Ok((worst <= 1e-12 && checked > 0, format!("{checked} iterates, max L·(h + 1/(8L)) = {worst:.3e}")))
}

fn random_step(r: &mut ChaCha8Rng, kind: Parametrization, n: usize, scale: f64) -> Stepsize {
    match kind {
        Parametrization::Scalar => Stepsize::Scalar(scale * r.random::<f64>()),
        Parametrization::Diagonal => Stepsize::Diagonal(Vector::from_fn(n, |_, _| scale * r.random::<f64>())),
        Parametrization::Full => Stepsize::Full(Matrix::from_fn(n, n, |_, _| scale * r.random_range(-0.5..1.0))),
    }
}

/// Central difference of `h` along `(D, d_β)` against the analytic pairing,
/// relative to `‖∇h‖·‖(D, d_β)‖`.
fn fd_error(h: &dyn Fn(&Stepsize, f64) -> f64, p: &Stepsize, beta: f64, grad_p: &Stepsize, grad_beta: f64, r: &mut ChaCha8Rng) -> f64 {
    let n = p.dim().unwrap_or(1);
    let dir = random_step(r, p.kind(), n, 1.0).map(|v| v - 0.5);
    let db: f64 = if grad_beta != 0.0 { r.random_range(-1.0..1.0) } else { 0.0 };
    let scale = p.norm().max(1e-3 * dir.norm());
    let eps = 1e-5 * scale / dir.norm();
    let fd = (h(&p.add_scaled(eps, &dir), beta + eps * db) - h(&p.add_scaled(-eps, &dir), beta - eps * db)) / (2.0 * eps);
    let an = grad_p.dot(&dir) + grad_beta * db;
    let norm = (grad_p.norm_squared() + grad_beta * grad_beta).sqrt() * (dir.norm_squared() + db * db).sqrt();
    (fd - an).abs() / norm.max(f64::MIN_POSITIVE)
}

fn fd_objective(r: &mut ChaCha8Rng, case: usize) -> Result<Objective> {
    let n = r.random_range(2..7);
    if case.is_multiple_of(2) {
        return Ok(QuadraticProblem::random(n, 10f64.powf(r.random_range(0.0..2.0)), true, r)?.objective());
    }
    let m = 3 * n;
    let rows: Vec<Vec<(usize, f64)>> = (0..m).map(|_| (0..n).map(|j| (j, r.sample(StandardNormal))).collect()).collect();
    let labels = (0..m).map(|_| if r.random::<bool>() { 1.0 } else { -1.0 }).collect();
    let a = crate::linalg::CsrMatrix::from_rows(&rows, n);
    make_logistic(LabeledDesign::new(a, labels)?, 0.1)
}

fn feedback_gradients() -> Result<(bool, String)> {
    let kinds = [Parametrization::Scalar, Parametrization::Diagonal, Parametrization::Full];
    let mut worst = [0.0f64; 4];
    let mut r = rng(6);
    for case in 0..200 {
        let obj = fd_objective(&mut r, case)?;
        let n = obj.dim();
        let l = obj.smoothness();
        let kind = kinds[case % 3];
        let p = random_step(&mut r, kind, n, 1.0 / l);
        let at = EvalPoint::new(&obj, gauss(&mut r, n));

        let fb = hypergrad_feedback(&obj, &at, &p)?.feedback;
        let h = |q: &Stepsize, _: f64| hypergrad_feedback(&obj, &at, q).map_or(f64::NAN, |v| v.feedback.value);
        worst[0] = worst[0].max(fd_error(&h, &p, 0.0, &fb.grad_p, 0.0, &mut r));

        let lambda = r.random_range(0.0..l);
        let fb = regularized_feedback(&obj, &at, &p, lambda)?.feedback;
        let h = |q: &Stepsize, _: f64| regularized_feedback(&obj, &at, q, lambda).map_or(f64::NAN, |v| v.feedback.value);
        worst[1] = worst[1].max(fd_error(&h, &p, 0.0, &fb.grad_p, 0.0, &mut r));

        let z = HBPoint::new(&obj, &HBState { z1: at.x.clone(), z2: gauss(&mut r, n) });
        let hb = HBParams::defaults(l);
        let beta = r.random::<f64>();
        let fb = hb_feedback(&obj, &z, &p, beta, &hb)?.feedback;
        let h = |q: &Stepsize, b: f64| hb_feedback(&obj, &z, q, b, &hb).map_or(f64::NAN, |v| v.feedback.value);
        worst[2] = worst[2].max(fd_error(&h, &p, beta, &fb.grad_p, fb.grad_beta.unwrap_or(0.0), &mut r));

        let comp = CompositeObjective::new(obj.clone(), std::sync::Arc::new(crate::problems::L1Term { weight: r.random_range(0.01..0.5) }));
        let g = prox_feedback_linearized_grad(&comp, &at, &p)?;
        let gm = comp.gradient_map_from(&at.x, &at.g, l);
        let gg = gm.norm_squared();
        // smooth part of the proximal feedback, written out directly
        let h = |q: &Stepsize, _: f64| q.apply(&gm).map_or(f64::NAN, |s| obj.value(&(&at.x - s)) / gg);
        worst[3] = worst[3].max(fd_error(&h, &p, 0.0, &g, 0.0, &mut r));
    }
    let ok = worst.iter().all(|w| *w <= 1e-6);
    Ok((
        ok,
        format!("200 cases each; hypergradient {:.1e}, regularized {:.1e}, heavy-ball {:.1e}, prox {:.1e}", worst[0], worst[1], worst[2], worst[3]),
    ))
}

fn nonconvex_envelope() -> Result<(bool, String)> {
    let mut details = Vec::new();
    let mut ok = true;
    for n in [2, 10] {
        let obj = make_rosenbrock(n)?;
        let l = obj.smoothness();
        let cfg = RunConfig::new(Algorithm::OsgmHNonconvex)
            .with_p0(Stepsize::scaled_identity(Parametrization::Diagonal, n, 1.0 / l))
            .with_x0(rosenbrock_start(n))
            .with_tol(1e-300)
            .with_budget(u64::MAX)
            .with_max_iters(500);
        let t = run(&obj, &cfg)?;
        let rep = gradient_envelope(&t, l, obj.fstar().unwrap_or(0.0));
        ok &= rep.holds(0.0, 1e-10) && rep.horizons.len() >= 500;
        details.push(format!("n = {n}: K = {}, worst ratio {:.3e}", rep.horizons.len(), rep.worst_ratio()));
    }
    Ok((ok, details.join("; ")))
}

fn prox_envelope() -> Result<(bool, String)> {
    let mut r = rng(8);
    let a = Matrix::from_fn(20, 5, |_, _| r.sample(StandardNormal));
    let b = gauss(&mut r, 20);
    let comp = make_lasso(&a, &b, 0.1)?;
    let l = comp.smoothness();
    let (_, phistar) = comp.solve_reference(&Vector::zeros(5), 1e-13, 200_000);
    let cfg = RunConfig::new(Algorithm::ProxOsgm)
        .with_p0(Stepsize::scaled_identity(Parametrization::Diagonal, 5, 1.0 / l))
        .with_tol(1e-300)
        .with_budget(u64::MAX)
        .with_max_iters(500)
        .with_seed(8);
    let t = run_composite(&comp, &cfg)?;
    let rep = gradient_envelope(&t, l, phistar);
    let ok = rep.holds(1e-12, 0.0) && !rep.horizons.is_empty();
    Ok((ok, format!("K = {} ({}), worst ratio {:.3e}", rep.horizons.len(), t.status.name(), rep.worst_ratio())))
}

fn agd_potential() -> Result<(bool, String)> {
    let mut r = rng(9);
    let mut worst_gap = f64::NEG_INFINITY;
    let mut ok = true;
    for kappa in [4.0, 25.0, 100.0] {
        let c = agd_contraction_factor(kappa);
        ok &= c <= 1.0 - 1.0 / kappa.sqrt();
        for _ in 0..5 {
            let n = r.random_range(2..20);
            let q = QuadraticProblem::random(n, kappa, true, &mut r)?;
            let tr = agd_potential_trace(&q, &gauss(&mut r, n), 200);
            for w in tr.windows(2).filter(|w| w[0] > 1e-280) {
                worst_gap = worst_gap.max(w[1] / w[0] - c);
            }
        }
    }
    // at κ = 4 the factor is (9/36)(1 + 1/8 + √17/8) = 0.4100970508…; the
    // often quoted 0.41008 is off by 1.7e-5
    let f4 = agd_contraction_factor(4.0);
    let hand = 0.25 * (1.125 + 17f64.sqrt() / 8.0);
    ok &= worst_gap <= 1e-10 && (f4 - hand).abs() <= 1e-5;
    Ok((ok, format!("max ratio − factor {worst_gap:.3e}; factor(4) = {f4:.10} (0.41008 differs by {:.1e})", (f4 - 0.41008).abs())))
}

fn spike() -> Result<(bool, String)> {
    let start = Instant::now();
    let sc = dynamics::spike_scenario(1e4, 1e-4, 200)?;
    let mono = dynamics::spike_monotone_replay(&sc)?;
    let f1 = mono.records[0].f;
    let monotone_ok = mono.f_column().iter().all(|f| *f <= f1);
    let secs = start.elapsed().as_secs_f64();
    let ok = sc.max_ratio > 1.0 && monotone_ok && secs < 30.0;
    Ok((ok, format!("δ = {:.3e}, onset k = {}, peak f/f(x¹) = {:.3e}, monotone replay ok: {monotone_ok}", sc.delta, sc.onset, sc.max_ratio)))
}

fn hdm_stabilization() -> Result<(bool, String)> {
    let kappa = 10.0;
    let lam = Vector::from_vec(vec![1.0, kappa]);
    let s0 = dynamics::DynState::new(0.5 / kappa, Vector::from_vec(vec![1.0, 1.0]))?;
    let center = 2.0 / (kappa + 1.0);
    let hdm = dynamics::stepsize_path(MapKind::Hdm, &s0, &lam, 1.0 / kappa, 5000)?;
    let osgm = dynamics::stepsize_path(MapKind::Osgm, &s0, &lam, 1.0 / kappa, 5000)?;
    let settled = dynamics::stays_in_band(&hdm, center, 0.05, 2000);
    let exits = dynamics::band_exits(&osgm, center, 0.05, 2000);
    Ok((settled && exits >= 10, format!("HDM in band after 2000: {settled}; OSGM exits: {exits}")))
}

fn benchmark_ordering() -> Result<(bool, String)> {
    let cfg = ExperimentConfig::new(vec![ProblemSpec::Suite { seed: 0 }], benchmark_algorithms());
    let res = run_experiment(&cfg)?;
    let best = res.stats.solved_count(Algorithm::OsgmBest);
    let counts: Vec<String> = res.stats.algorithms.iter().map(|a| format!("{a} {}", res.stats.solved_count(*a))).collect();
    let ok = res.stats.errors.is_empty() && res.stats.algorithms.iter().all(|a| res.stats.solved_count(*a) <= best);
    Ok((ok, format!("solved of {}: {}", res.stats.instances.len(), counts.join(", "))))
}

/// Cumulative regret of the AdaGrad heavy-ball learner against the best of a
/// 5×5 grid of fixed `(P̂, β̂)`, at each horizon in `horizons`.
pub fn adagrad_regret(horizons: &[usize]) -> Result<Vec<f64>> {
    let kmax = *horizons.iter().max().unwrap_or(&0);
    let q = QuadraticProblem::random(10, 1e3, true, &mut rng(13))?;
    let obj = q.objective();
    let l = obj.smoothness();
    let hb = HBParams::defaults(l);
    let cfg = RunConfig::new(Algorithm::OsgmHbAdagrad).with_tol(1e-300).with_budget(u64::MAX).with_max_iters(kmax).with_seed(13).recording_iterates();
    let t = run(&obj, &cfg)?;
    let grid: Vec<(Stepsize, f64)> = [0.25, 0.5, 1.0, 1.5, 2.0]
        .iter()
        .flat_map(|c| [0.0, 0.25, 0.5, 0.75, 0.95].map(|b| (Stepsize::scaled_identity(Parametrization::Diagonal, 10, c / l), b)))
        .collect();
    let mut learner = 0.0;
    let mut fixed = vec![0.0; grid.len()];
    let mut out = Vec::new();
    for (k, rec) in t.records.iter().enumerate().take(kmax) {
        let (Some(x), Some(z2)) = (&rec.x, &rec.z2) else { break };
        if !rec.feedback.is_finite() {
            break;
        }
        learner += rec.feedback;
        for (acc, (p, b)) in fixed.iter_mut().zip(&grid) {
            *acc += comparator_feedback(&obj, x, z2, p, *b, &hb)?;
        }
        if horizons.contains(&(k + 1)) {
            out.push(learner - fixed.iter().cloned().fold(f64::INFINITY, f64::min));
        }
    }
    if out.len() != horizons.len() {
        return Err(OsgmError::InvalidInput(format!("run stopped after {} of {kmax} iterations", t.iterations())));
    }
    Ok(out)
}

fn adagrad_regret_check() -> Result<(bool, String)> {
    let rho = adagrad_regret(&[100, 1000, 10000])?;
    let c = rho[0].max(0.0) / 10.0;
    let ok = rho[1] <= c * 1000f64.sqrt() && rho[2] <= c * 100.0;
    Ok((ok, format!("c = {c:.4e}; ρ/√K at 100, 1000, 10000: {:.4e}, {:.4e}, {:.4e}", rho[0] / 10.0, rho[1] / 1000f64.sqrt(), rho[2] / 100.0)))
}

fn parser() -> Result<(bool, String)> {
    let mut ok = true;
    for seed in 0..100 {
        let ds = random_dataset(seed);
        let text = serialize_libsvm(&ds);
        let back = parse_libsvm(&text)?;
        ok &= back == ds && serialize_libsvm(&back) == text;
    }
    let mut located = 0;
    let bad = ["x 1:1", "1 1-2", "1 0:1", "1 a:1", "1 1:b", "1 1:nan", "1 3:1 2:1"];
    for (i, b) in bad.iter().enumerate() {
        let at = i % 3;
        let mut lines = vec!["1 1:0.5 3:2", "-1 2:1"];
        lines.insert(at, b);
        if let Err(OsgmError::Parse { line, .. }) = parse_libsvm(&lines.join("\n")) {
            located += usize::from(line == at + 1);
        }
    }
    ok &= located == bad.len();
    Ok((ok, format!("100 round trips; {located}/{} malformed lines located", bad.len())))
}
