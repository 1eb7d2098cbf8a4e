//! Methods driven by heavy-ball feedback `h_z(P, β)`.

use super::config::{Algorithm, RunConfig};
use super::driver::{resolve_p0, resolve_x0, Driver};
use super::trace::{RunStatus, RunTrace};
use crate::feedback::{hb_feedback, EvalPoint, HBFeedback, HBParams, HBPoint};
use crate::learners::{adagrad_step, ogd_step, AdaGradAccumulator, LearnerConfig};
use crate::problems::Objective;
use crate::stepsizes::{CandidateSet, Parametrization, Stepsize};
use crate::{OsgmError, Result, Vector};

fn params(cfg: &RunConfig, l: f64) -> Result<HBParams> {
    match cfg.hb {
        Some(hb) => HBParams::new(hb.omega, hb.tau, l),
        None => Ok(HBParams::defaults(l)),
    }
}

/// Live vectors of length `n` needed by the lookahead method: `z₁`, `z₂`,
/// `∇f(z₁)`, the proposal (overwritten by the lookahead point), `r` (then
/// `∇f` at the lookahead point), plus `P` and `∇_P h`.
pub fn osgm_best_memory(kind: Parametrization, n: usize) -> usize {
    5 + match kind {
        Parametrization::Scalar => 0,
        Parametrization::Diagonal => 2,
        Parametrization::Full => 2 * n,
    }
}

fn shifted(obj: &Objective, f: f64) -> f64 {
    f - obj.fstar().unwrap_or(0.0)
}

/// The lookahead heavy-ball method with OGD on `(P, β)`.
///
/// Each iteration spends two gradients: one at the proposal `z₁^{k+1/2}`,
/// shared by the feedback gradient and the lookahead step, and one at the
/// lookahead point, reused as `∇f(z₁^{k+1})` when it is accepted.
pub fn run_osgm_best(obj: &Objective, cfg: &RunConfig) -> Result<RunTrace> {
    let mut drv = Driver::new(obj, cfg, Algorithm::OsgmBest)?;
    let n = obj.dim();
    let l = obj.smoothness();
    let hb = params(cfg, l)?;
    let (eta_p, eta_beta) = cfg.resolved_eta(l, &hb);
    let lc = LearnerConfig { eta_p, eta_beta, set: cfg.candidate_set.unwrap_or_default() };
    let (mut p, mut beta) = lc.set.project(&resolve_p0(cfg, n, 1.0 / (4.0 * l))?, cfg.beta0.unwrap_or(0.5));
    drv.memory_vectors = Some(osgm_best_memory(p.kind(), n));
    let x0 = resolve_x0(cfg, n)?;
    let mut z = HBPoint { z1: EvalPoint::new(obj, x0.clone()), z2: x0 };
    let step = 1.0 / (l + hb.omega);
    for k in 1.. {
        if let Some(status) = drv.open(k, &z.z1, 2) {
            return Ok(drv.finish(status, z.z1.x, z.z1.f, &z.z1.g));
        }
        let phi = z.shifted_potential(hb.omega);
        annotate(&mut drv, cfg, &z, shifted(obj, phi), &p, beta);
        let HBFeedback { feedback, proposal, denominator } = match hb_feedback(obj, &z, &p, beta, &hb) {
            Ok(h) => h,
            Err(OsgmError::StationaryPoint(_)) => return Ok(drv.finish(RunStatus::Converged, z.z1.x, z.z1.f, &z.z1.g)),
            Err(e) => return Err(e),
        };
        let r = &proposal.g + (&proposal.x - &z.z1.x) * hb.omega;
        let look = EvalPoint::new(obj, &proposal.x - r * step);
        let phi_look = look.f + 0.5 * hb.omega * (&look.x - &z.z1.x).norm_squared();
        let accepted = phi_look <= phi;
        let phi_next = if accepted { phi_look } else { phi };
        let rec = drv.last();
        rec.feedback = feedback.value;
        rec.feedback_grad_norm = feedback.dual_norm(l);
        rec.progress = (phi_next - phi) / denominator;
        rec.accepted = accepted;
        if accepted {
            let z1_old = std::mem::replace(&mut z.z1, look);
            z.z2 = z1_old.x;
        }
        let (pn, bn) = ogd_step(&p, beta, &feedback, &lc);
        p = pn;
        beta = bn;
    }
    unreachable!()
}

/// The monotone heavy-ball method with AdaGrad on `(P, β)`; one gradient per
/// iteration, at the proposal.
pub fn run_osgm_hb_adagrad(obj: &Objective, cfg: &RunConfig) -> Result<RunTrace> {
    let mut drv = Driver::new(obj, cfg, Algorithm::OsgmHbAdagrad)?;
    let n = obj.dim();
    let l = obj.smoothness();
    let hb = params(cfg, l)?;
    let (eta_p, eta_beta) = cfg.resolved_eta(l, &hb);
    let set = cfg.candidate_set.unwrap_or(CandidateSet::default_box(l));
    if !set.p.is_bounded() || !set.beta.is_bounded() {
        return Err(OsgmError::InvalidConfig("the AdaGrad heavy-ball method needs bounded candidate sets".into()));
    }
    if cfg.candidate_set.is_none() {
        drv.notes.push(format!("default candidate box: P entries in [{:e}, {:e}], beta in [0, 1]", set.p.lower, set.p.upper));
    }
    let lc = LearnerConfig { eta_p, eta_beta, set };
    let (mut p, mut beta) = set.project(&resolve_p0(cfg, n, 1.0 / (4.0 * l))?, cfg.beta0.unwrap_or(0.5));
    let mut acc = AdaGradAccumulator::new(&p);
    let x0 = resolve_x0(cfg, n)?;
    let mut z = HBPoint { z1: EvalPoint::new(obj, x0.clone()), z2: x0 };
    for k in 1.. {
        if let Some(status) = drv.open(k, &z.z1, 1) {
            return Ok(drv.finish(status, z.z1.x, z.z1.f, &z.z1.g));
        }
        let phi = z.shifted_potential(hb.omega);
        annotate(&mut drv, cfg, &z, shifted(obj, phi), &p, beta);
        let HBFeedback { feedback, proposal, denominator } = match hb_feedback(obj, &z, &p, beta, &hb) {
            Ok(h) => h,
            Err(OsgmError::StationaryPoint(_)) => return Ok(drv.finish(RunStatus::Converged, z.z1.x, z.z1.f, &z.z1.g)),
            Err(e) => return Err(e),
        };
        let phi_half = proposal.f + 0.5 * hb.omega * (&proposal.x - &z.z1.x).norm_squared();
        let accepted = phi_half <= phi;
        let phi_next = if accepted { phi_half } else { phi };
        let rec = drv.last();
        rec.feedback = feedback.value;
        rec.feedback_grad_norm = feedback.dual_norm(l);
        rec.progress = (phi_next - phi) / denominator;
        rec.accepted = accepted;
        if accepted {
            let z1_old = std::mem::replace(&mut z.z1, proposal);
            z.z2 = z1_old.x;
        }
        let ((pn, bn), an) = adagrad_step(&p, beta, &feedback, &acc, &lc);
        p = pn;
        beta = bn;
        acc = an;
    }
    unreachable!()
}

fn annotate(drv: &mut Driver<'_>, cfg: &RunConfig, z: &HBPoint, potential: f64, p: &Stepsize, beta: f64) {
    let rec = drv.last();
    rec.potential = potential;
    rec.step_summary = p.summary();
    rec.beta = beta;
    if cfg.record_iterates {
        rec.z2 = Some(z.z2.clone());
    }
}

/// Heavy-ball feedback at a fixed comparator, evaluated without touching the
/// run's counters.  Used to replay a trace.
pub fn comparator_feedback(obj: &Objective, z1: &Vector, z2: &Vector, p: &Stepsize, beta: f64, hb: &HBParams) -> Result<f64> {
    let f = obj.with_fresh_counters();
    let z = HBPoint { z1: EvalPoint::new(&f, z1.clone()), z2: z2.clone() };
    Ok(hb_feedback(&f, &z, p, beta, hb)?.feedback.value)
}
