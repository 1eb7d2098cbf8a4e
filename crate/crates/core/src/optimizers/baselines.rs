//! Fixed-rule baselines: GD, heavy ball, two accelerated methods, Adam and AdaGrad.

use super::config::{Algorithm, RunConfig};
use super::driver::{resolve_x0, Driver};
use super::trace::RunTrace;
use crate::feedback::EvalPoint;
use crate::problems::Objective;
use crate::{OsgmError, Result, Vector};

pub const ADAM_BETA1: f64 = 0.9;
pub const ADAM_BETA2: f64 = 0.999;
pub const ADAM_EPSILON: f64 = 1e-8;
pub const ADAGRAD_EPSILON: f64 = 1e-10;
pub const DEFAULT_HB_MOMENTUM: f64 = 0.9;

fn lr(cfg: &RunConfig, obj: &Objective) -> f64 {
    cfg.lr.unwrap_or(1.0 / obj.smoothness())
}

pub fn run_gd(obj: &Objective, cfg: &RunConfig) -> Result<RunTrace> {
    run_gd_hb_inner(obj, cfg, Algorithm::Gd, 0.0)
}

/// `x⁺ = x − a∇f(x) + β(x − x⁻)`.
pub fn run_gd_hb(obj: &Objective, cfg: &RunConfig) -> Result<RunTrace> {
    run_gd_hb_inner(obj, cfg, Algorithm::GdHb, cfg.momentum.unwrap_or(DEFAULT_HB_MOMENTUM))
}

fn run_gd_hb_inner(obj: &Objective, cfg: &RunConfig, algo: Algorithm, beta: f64) -> Result<RunTrace> {
    let mut drv = Driver::new(obj, cfg, algo)?;
    let a = lr(cfg, obj);
    let x0 = resolve_x0(cfg, obj.dim())?;
    let mut prev = x0.clone();
    let mut cur = EvalPoint::new(obj, x0);
    for k in 1.. {
        if let Some(status) = drv.open(k, &cur, 1) {
            return Ok(drv.finish(status, cur.x, cur.f, &cur.g));
        }
        let next = &cur.x - &cur.g * a + (&cur.x - &prev) * beta;
        let rec = drv.last();
        rec.step_summary = a;
        rec.beta = beta;
        rec.accepted = true;
        prev = std::mem::replace(&mut cur, EvalPoint::new(obj, next)).x;
    }
    unreachable!()
}

/// Nesterov's method for convex problems, `y = x + (k − 1)/(k + 2)(x − x⁻)`.
/// Gradients are taken at `y`, so records and the stopping test refer to `y`.
pub fn run_agd_cvx(obj: &Objective, cfg: &RunConfig) -> Result<RunTrace> {
    let mut drv = Driver::new(obj, cfg, Algorithm::AgdCvx)?;
    let a = lr(cfg, obj);
    let x0 = resolve_x0(cfg, obj.dim())?;
    let mut x_prev = x0.clone();
    let mut y = EvalPoint::new(obj, x0);
    for k in 1.. {
        if let Some(status) = drv.open(k, &y, 1) {
            return Ok(drv.finish(status, y.x, y.f, &y.g));
        }
        let x_next = &y.x - &y.g * a;
        let mom = k as f64 / (k as f64 + 3.0);
        let y_next = &x_next + (&x_next - &x_prev) * mom;
        let rec = drv.last();
        rec.step_summary = a;
        rec.beta = mom;
        rec.accepted = true;
        x_prev = x_next;
        y = EvalPoint::new(obj, y_next);
    }
    unreachable!()
}

/// Accelerated method for strongly convex problems with the `(x, y, z)`
/// recursion and momentum `1/(√κ + 1)`.
pub fn run_agd_scvx(obj: &Objective, cfg: &RunConfig) -> Result<RunTrace> {
    let mu = obj
        .strong_convexity()
        .filter(|m| *m > 0.0)
        .ok_or_else(|| OsgmError::InvalidConfig(format!("{} needs a strong convexity constant", Algorithm::AgdScvx)))?;
    let mut drv = Driver::new(obj, cfg, Algorithm::AgdScvx)?;
    let l = obj.smoothness();
    let a = lr(cfg, obj);
    let sk = (l / mu).sqrt();
    let x0 = resolve_x0(cfg, obj.dim())?;
    let mut z = x0.clone();
    let mut y = EvalPoint::new(obj, x0);
    for k in 1.. {
        if let Some(status) = drv.open(k, &y, 1) {
            return Ok(drv.finish(status, y.x, y.f, &y.g));
        }
        let x = &y.x - &y.g * a;
        z = &z * (1.0 - 1.0 / sk) + (&y.x - &y.g / mu) * (1.0 / sk);
        let rec = drv.last();
        rec.step_summary = a;
        rec.beta = 1.0 / (sk + 1.0);
        rec.accepted = true;
        let y_next = &x + (&z - &x) / (sk + 1.0);
        y = EvalPoint::new(obj, y_next);
    }
    unreachable!()
}

/// Adam with bias correction.
pub fn run_adam(obj: &Objective, cfg: &RunConfig) -> Result<RunTrace> {
    let mut drv = Driver::new(obj, cfg, Algorithm::Adam)?;
    let a = lr(cfg, obj);
    let n = obj.dim();
    let mut cur = EvalPoint::new(obj, resolve_x0(cfg, n)?);
    let mut m = Vector::zeros(n);
    let mut v = Vector::zeros(n);
    for k in 1.. {
        if let Some(status) = drv.open(k, &cur, 1) {
            return Ok(drv.finish(status, cur.x, cur.f, &cur.g));
        }
        m = &m * ADAM_BETA1 + &cur.g * (1.0 - ADAM_BETA1);
        v = &v * ADAM_BETA2 + cur.g.map(|g| g * g) * (1.0 - ADAM_BETA2);
        let c1 = 1.0 - ADAM_BETA1.powi(k as i32);
        let c2 = 1.0 - ADAM_BETA2.powi(k as i32);
        let step = m.zip_map(&v, |mi, vi| (mi / c1) / ((vi / c2).sqrt() + ADAM_EPSILON));
        let rec = drv.last();
        rec.step_summary = a;
        rec.accepted = true;
        let next = &cur.x - step * a;
        cur = EvalPoint::new(obj, next);
    }
    unreachable!()
}

/// Diagonal AdaGrad on the iterates.
pub fn run_adagrad(obj: &Objective, cfg: &RunConfig) -> Result<RunTrace> {
    let mut drv = Driver::new(obj, cfg, Algorithm::Adagrad)?;
    let a = lr(cfg, obj);
    let n = obj.dim();
    let mut cur = EvalPoint::new(obj, resolve_x0(cfg, n)?);
    let mut acc = Vector::zeros(n);
    for k in 1.. {
        if let Some(status) = drv.open(k, &cur, 1) {
            return Ok(drv.finish(status, cur.x, cur.f, &cur.g));
        }
        acc += cur.g.map(|g| g * g);
        let step = cur.g.zip_map(&acc, |g, s| g / (s.sqrt() + ADAGRAD_EPSILON));
        let rec = drv.last();
        rec.step_summary = a;
        rec.accepted = true;
        let next = &cur.x - step * a;
        cur = EvalPoint::new(obj, next);
    }
    unreachable!()
}
