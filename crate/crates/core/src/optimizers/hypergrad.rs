//! Methods driven by hypergradient feedback `h_x(P)`.

use super::config::{Algorithm, LambdaPolicy, RunConfig};
use super::driver::{require_scalar, resolve_p0, resolve_x0, Driver};
use super::trace::{RunStatus, RunTrace};
use crate::feedback::{hypergrad_feedback, regularized_feedback, weak_convexity_bound, EvalPoint, HBParams, HypergradFeedback};
use crate::learners::{ogd_step, online_prox_point_step, LearnerConfig};
use crate::problems::Objective;
use crate::stepsizes::{CandidateSet, Stepsize};
use crate::{OsgmError, Result};

/// Landscape action applied to the proposal `x^{k+1/2} = x^k − P_k∇f(x^k)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Landscape {
    /// Accept every proposal.
    Vanilla,
    /// Null step unless the proposal does not increase `f`.
    Monotone,
    /// Extra `1/L` gradient step on the proposal, then the monotone rule.
    Lookahead,
}

impl Landscape {
    fn algorithm(self) -> Algorithm {
        match self {
            Landscape::Vanilla => Algorithm::OsgmH,
            Landscape::Monotone => Algorithm::OsgmHMonotone,
            Landscape::Lookahead => Algorithm::OsgmHLookahead,
        }
    }

    /// Gradient oracles per iteration.
    fn cost(self) -> u64 {
        match self {
            Landscape::Lookahead => 2,
            _ => 1,
        }
    }
}

fn learner(cfg: &RunConfig, obj: &Objective, default_set: Option<CandidateSet>) -> LearnerConfig {
    let l = obj.smoothness();
    let (eta_p, eta_beta) = cfg.resolved_eta(l, &HBParams::defaults(l));
    LearnerConfig { eta_p, eta_beta, set: cfg.candidate_set.or(default_set).unwrap_or_default() }
}

/// Next iterate under the landscape rule; returns it and whether the
/// proposal (or its lookahead) was taken.  Ties go to the proposal.
fn landscape_step(obj: &Objective, cur: &EvalPoint, proposal: EvalPoint, action: Landscape) -> (EvalPoint, bool) {
    match action {
        Landscape::Vanilla => (proposal, true),
        Landscape::Monotone => {
            if proposal.f <= cur.f {
                (proposal, true)
            } else {
                (cur.clone(), false)
            }
        }
        Landscape::Lookahead => {
            let look_x = &proposal.x - &proposal.g / obj.smoothness();
            let look = EvalPoint::new(obj, look_x);
            if look.f <= cur.f {
                (look, true)
            } else {
                (cur.clone(), false)
            }
        }
    }
}

fn stationary_stop(e: OsgmError) -> Result<RunStatus> {
    match e {
        OsgmError::StationaryPoint(_) => Ok(RunStatus::Converged),
        other => Err(other),
    }
}

/// OSGM-H with OGD on `P` and the chosen landscape action.
pub fn run_osgm_h(obj: &Objective, cfg: &RunConfig, action: Landscape) -> Result<RunTrace> {
    let mut drv = Driver::new(obj, cfg, action.algorithm())?;
    let n = obj.dim();
    let l = obj.smoothness();
    let lc = learner(cfg, obj, None);
    let mut p = resolve_p0(cfg, n, 1.0 / l)?;
    let mut cur = EvalPoint::new(obj, resolve_x0(cfg, n)?);
    for k in 1.. {
        if let Some(status) = drv.open(k, &cur, action.cost()) {
            return Ok(drv.finish(status, cur.x, cur.f, &cur.g));
        }
        let HypergradFeedback { feedback, proposal } = match hypergrad_feedback(obj, &cur, &p) {
            Ok(h) => h,
            Err(e) => {
                let status = stationary_stop(e)?;
                return Ok(drv.finish(status, cur.x, cur.f, &cur.g));
            }
        };
        let gg = cur.grad_norm_sq();
        let (next, accepted) = landscape_step(obj, &cur, proposal, action);
        let rec = drv.last();
        rec.feedback = feedback.value;
        rec.feedback_grad_norm = feedback.grad_p.norm();
        rec.progress = (next.f - cur.f) / gg;
        rec.step_summary = p.summary();
        rec.accepted = accepted;
        p = ogd_step(&p, 0.0, &feedback, &lc).0;
        cur = next;
    }
    unreachable!()
}

/// Classic hypergradient descent: update `P` first, then step with the new `P`.
pub fn run_classic_hdm(obj: &Objective, cfg: &RunConfig) -> Result<RunTrace> {
    let mut drv = Driver::new(obj, cfg, Algorithm::ClassicHdm)?;
    let n = obj.dim();
    let l = obj.smoothness();
    let lc = learner(cfg, obj, None);
    let mut p = resolve_p0(cfg, n, 1.0 / l)?;
    let mut cur = EvalPoint::new(obj, resolve_x0(cfg, n)?);
    for k in 1.. {
        if let Some(status) = drv.open(k, &cur, 2) {
            return Ok(drv.finish(status, cur.x, cur.f, &cur.g));
        }
        let h = match hypergrad_feedback(obj, &cur, &p) {
            Ok(h) => h,
            Err(e) => {
                let status = stationary_stop(e)?;
                return Ok(drv.finish(status, cur.x, cur.f, &cur.g));
            }
        };
        let p_next = ogd_step(&p, 0.0, &h.feedback, &lc).0;
        let next = EvalPoint::new(obj, &cur.x - p_next.apply(&cur.g)?);
        let gg = cur.grad_norm_sq();
        let rec = drv.last();
        rec.feedback = h.feedback.value;
        rec.feedback_grad_norm = h.feedback.grad_p.norm();
        rec.progress = (next.f - cur.f) / gg;
        rec.step_summary = p.summary();
        rec.accepted = true;
        p = p_next;
        cur = next;
    }
    unreachable!()
}

/// Lookahead OSGM-H with regularized feedback `h^λ` and projected OGD, for
/// nonconvex objectives.  `λ_k` comes from the weak-convexity estimate unless
/// fixed by the configuration.
pub fn run_osgm_h_nonconvex(obj: &Objective, cfg: &RunConfig) -> Result<RunTrace> {
    let mut drv = Driver::new(obj, cfg, Algorithm::OsgmHNonconvex)?;
    let n = obj.dim();
    let l = obj.smoothness();
    let lc = learner(cfg, obj, Some(CandidateSet::default_box(l)));
    if !lc.set.p.is_bounded() {
        return Err(OsgmError::InvalidConfig("the nonconvex method needs a bounded stepsize set".into()));
    }
    let mut p = lc.set.project_p(&resolve_p0(cfg, n, 1.0 / l)?);
    let diam = lc.set.diameter_p(p.kind(), n);
    let mut cur = EvalPoint::new(obj, resolve_x0(cfg, n)?);
    for k in 1.. {
        if let Some(status) = drv.open(k, &cur, 2) {
            return Ok(drv.finish(status, cur.x, cur.f, &cur.g));
        }
        let lambda = match cfg.lambda {
            LambdaPolicy::Adaptive => weak_convexity_bound(obj, &cur, diam, p.kind()),
            LambdaPolicy::Fixed(v) => v.clamp(0.0, l),
        };
        let HypergradFeedback { feedback, proposal } = match regularized_feedback(obj, &cur, &p, lambda) {
            Ok(h) => h,
            Err(e) => {
                let status = stationary_stop(e)?;
                return Ok(drv.finish(status, cur.x, cur.f, &cur.g));
            }
        };
        let gg = cur.grad_norm_sq();
        let (next, accepted) = landscape_step(obj, &cur, proposal, Landscape::Lookahead);
        let rec = drv.last();
        rec.feedback = feedback.value;
        rec.feedback_grad_norm = feedback.grad_p.norm();
        rec.progress = (next.f - cur.f) / gg;
        rec.step_summary = p.summary();
        rec.lambda = lambda;
        rec.accepted = accepted;
        p = ogd_step(&p, 0.0, &feedback, &lc).0;
        cur = next;
    }
    unreachable!()
}

/// Lookahead OSGM-H whose scalar stepsize follows the online proximal point
/// update.  `η = ∞` gives the steepest-descent stepsize of the current iterate.
pub fn run_osgm_bb(obj: &Objective, cfg: &RunConfig) -> Result<RunTrace> {
    let mut drv = Driver::new(obj, cfg, Algorithm::OsgmBb)?;
    let n = obj.dim();
    let l = obj.smoothness();
    let eta = cfg.eta_p.unwrap_or(1.0 / l);
    let mut p = resolve_p0(&cfg.clone().with_parametrization(crate::Parametrization::Scalar), n, 1.0 / l)?;
    require_scalar(&p, "the proximal point method")?;
    let cost = if obj.meta().quadratic && obj.has_hvp() { 2 } else { 3 };
    let mut cur = EvalPoint::new(obj, resolve_x0(cfg, n)?);
    for k in 1.. {
        if let Some(status) = drv.open(k, &cur, cost) {
            return Ok(drv.finish(status, cur.x, cur.f, &cur.g));
        }
        let gg = cur.grad_norm_sq();
        let proposal = EvalPoint::new(obj, &cur.x - p.apply(&cur.g)?);
        let h = (proposal.f - cur.f) / gg;
        let hprime = -proposal.g.dot(&cur.g) / gg;
        let alpha_next = match online_prox_point_step(obj, &cur, &p, eta) {
            Ok(a) => a,
            Err(e) => {
                let status = stationary_stop(e)?;
                return Ok(drv.finish(status, cur.x, cur.f, &cur.g));
            }
        };
        let (next, accepted) = landscape_step(obj, &cur, proposal, Landscape::Lookahead);
        let rec = drv.last();
        rec.feedback = h;
        rec.feedback_grad_norm = hprime.abs();
        rec.progress = (next.f - cur.f) / gg;
        rec.step_summary = p.summary();
        rec.accepted = accepted;
        p = Stepsize::Scalar(alpha_next);
        cur = next;
    }
    unreachable!()
}
