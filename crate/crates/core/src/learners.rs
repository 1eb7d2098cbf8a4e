//! Online learners that update the stepsize from feedback.

use crate::feedback::{hypergrad_feedback, EvalPoint, FeedbackEval};
use crate::problems::{CompositeObjective, Objective};
use crate::stepsizes::{CandidateSet, Parametrization, Stepsize};
use crate::{OsgmError, Result, Vector};

/// Learning rates and candidate sets shared by the learners.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LearnerConfig {
    pub eta_p: f64,
    pub eta_beta: f64,
    pub set: CandidateSet,
}

impl LearnerConfig {
    pub fn new(eta_p: f64, eta_beta: f64, set: CandidateSet) -> Result<LearnerConfig> {
        if !(eta_p >= 0.0) || !(eta_beta >= 0.0) {
            return Err(OsgmError::InvalidParameter(format!("learning rates must be nonnegative, got ({eta_p}, {eta_beta})")));
        }
        Ok(LearnerConfig { eta_p, eta_beta, set })
    }

    pub fn unbounded(eta_p: f64, eta_beta: f64) -> LearnerConfig {
        LearnerConfig { eta_p, eta_beta, set: CandidateSet::unbounded() }
    }
}

/// Projected online gradient step on `(P, β)`.
pub fn ogd_step(p: &Stepsize, beta: f64, grad: &FeedbackEval, cfg: &LearnerConfig) -> (Stepsize, f64) {
    let p_new = cfg.set.project_p(&p.add_scaled(-cfg.eta_p, &grad.grad_p));
    let beta_new = match grad.grad_beta {
        Some(gb) => cfg.set.project_beta(beta - cfg.eta_beta * gb),
        None => beta,
    };
    (p_new, beta_new)
}

/// Running sums of squared feedback gradients.
#[derive(Clone, Debug, PartialEq)]
pub struct AdaGradAccumulator {
    pub u: Stepsize,
    pub v: f64,
    pub epsilon: f64,
}

impl AdaGradAccumulator {
    pub const DEFAULT_EPSILON: f64 = 1e-12;

    /// Zero accumulator shaped like `p`.
    pub fn new(p: &Stepsize) -> AdaGradAccumulator {
        AdaGradAccumulator { u: p.zeros_like(), v: 0.0, epsilon: Self::DEFAULT_EPSILON }
    }
}

/// AdaGrad step: accumulate, then take an entrywise scaled projected step.
pub fn adagrad_step(
    p: &Stepsize,
    beta: f64,
    grad: &FeedbackEval,
    acc: &AdaGradAccumulator,
    cfg: &LearnerConfig,
) -> ((Stepsize, f64), AdaGradAccumulator) {
    let eps = acc.epsilon;
    let u = acc.u.zip_map(&grad.grad_p, |u, g| u + g * g);
    let scaled = u.zip_map(&grad.grad_p, |u, g| if g == 0.0 { 0.0 } else { g / (u + eps).sqrt() });
    let p_new = cfg.set.project_p(&p.add_scaled(-cfg.eta_p, &scaled));
    let (v, beta_new) = match grad.grad_beta {
        Some(gb) => {
            let v = acc.v + gb * gb;
            let step = if gb == 0.0 { 0.0 } else { gb / (v + eps).sqrt() };
            (v, cfg.set.project_beta(beta - cfg.eta_beta * step))
        }
        None => (acc.v, beta),
    };
    ((p_new, beta_new), AdaGradAccumulator { u, v, epsilon: eps })
}

const GOLDEN: f64 = 0.618_033_988_749_894_8;

fn golden_section(mut lo: f64, mut hi: f64, tol: f64, f: impl Fn(f64) -> f64) -> f64 {
    let mut x1 = hi - GOLDEN * (hi - lo);
    let mut x2 = lo + GOLDEN * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..200 {
        if hi - lo <= tol * (1.0 + lo.abs().max(hi.abs())) {
            break;
        }
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - GOLDEN * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + GOLDEN * (hi - lo);
            f2 = f(x2);
        }
    }
    0.5 * (lo + hi)
}

/// Online proximal point update of a scalar stepsize,
/// `argmin_α { h_x(α) + (α − α_k)²/(2η) }`.
///
/// `η = ∞` minimizes the feedback itself.  Quadratics are solved in closed
/// form from one hvp: `h_x(α) = aα²/2 − α` with `a = ⟨g, Ag⟩/‖g‖²`.  Other
/// objectives use golden-section search on `[α_k − 10η|h′|, α_k + 10η|h′|]`
/// (one gradient for `h′(α_k)`, value oracles for the search).
pub fn online_prox_point_step(obj: &Objective, at: &EvalPoint, p_k: &Stepsize, eta: f64) -> Result<f64> {
    let alpha_k = match p_k {
        Stepsize::Scalar(a) => *a,
        other => return Err(OsgmError::UnsupportedParametrization(format!("online proximal point needs a scalar stepsize, got {}", other.kind()))),
    };
    if !(eta >= 0.0) {
        return Err(OsgmError::InvalidParameter(format!("η must be nonnegative, got {eta}")));
    }
    let gg = at.grad_norm_sq();
    if !(gg > 0.0) || !gg.is_finite() {
        return Err(OsgmError::StationaryPoint(gg.sqrt()));
    }
    if eta == 0.0 {
        return Ok(alpha_k);
    }
    if obj.meta().quadratic && obj.has_hvp() {
        let ag = obj.hvp(&at.x, &at.g).expect("hvp advertised");
        let a = at.g.dot(&ag) / gg;
        if eta.is_infinite() {
            if !(a > 0.0) {
                return Err(OsgmError::DegenerateDirection(a));
            }
            return Ok(1.0 / a);
        }
        return Ok((eta + alpha_k) / (a * eta + 1.0));
    }
    let h = |alpha: f64| (obj.value(&(&at.x - &at.g * alpha)) - at.f) / gg;
    if eta.is_infinite() {
        return Ok(minimize_unregularized(&h, alpha_k, 1.0 / obj.smoothness()));
    }
    let slope = hypergrad_feedback(obj, at, p_k)?.feedback.grad_p.summary();
    if slope == 0.0 {
        return Ok(alpha_k);
    }
    let radius = 10.0 * eta * slope.abs();
    let sub = |alpha: f64| h(alpha) + (alpha - alpha_k).powi(2) / (2.0 * eta);
    Ok(golden_section(alpha_k - radius, alpha_k + radius, 1e-10, sub))
}

/// Minimizes a 1D function by doubling steps from `start` until the value
/// rises, then golden section on the final bracket.
fn minimize_unregularized(h: &impl Fn(f64) -> f64, start: f64, unit: f64) -> f64 {
    let f0 = h(start);
    let dir = if h(start + unit) < f0 {
        1.0
    } else if h(start - unit) < f0 {
        -1.0
    } else {
        return golden_section(start - unit, start + unit, 1e-10, h);
    };
    let mut prev = start;
    let mut cur = start + dir * unit;
    let mut fcur = h(cur);
    let mut step = unit;
    for _ in 0..80 {
        step *= 2.0;
        let next = cur + dir * step;
        let fnext = h(next);
        if !(fnext < fcur) {
            let (lo, hi) = if dir > 0.0 { (prev, next) } else { (next, prev) };
            return golden_section(lo, hi, 1e-10, h);
        }
        prev = cur;
        cur = next;
        fcur = fnext;
    }
    cur
}

/// Prescient online proximal gradient update for composite objectives.
///
/// Linearizes the smooth part `ℓ(P) = f(x − P G)/‖G‖²` at `P_k` (one gradient
/// oracle at `x − P_k G`, with `G = G_L(x)`) and keeps the nonsmooth part
/// `w(x − P G)/‖G‖²` exact.  For separable `w` and diagonal `P` the subproblem
/// splits into scalar prox evaluations; `w ≡ 0` reduces to a projected
/// gradient step in any parametrization.
pub fn online_prox_grad_step(comp: &CompositeObjective, at: &EvalPoint, p_k: &Stepsize, eta: f64, set: &CandidateSet) -> Result<Stepsize> {
    let l = comp.smoothness();
    let gm = comp.gradient_map_from(&at.x, &at.g, l);
    let gg = gm.norm_squared();
    if !(gg > 0.0) || !gg.is_finite() {
        return Err(OsgmError::StationaryPoint(gg.sqrt()));
    }
    let zero_term = comp.term().is_zero();
    if !zero_term && p_k.kind() != Parametrization::Diagonal {
        return Err(OsgmError::UnsupportedParametrization(format!(
            "proximal stepsize update needs a diagonal stepsize with a nonzero prox term, got {}",
            p_k.kind()
        )));
    }
    let cand = &at.x - p_k.apply(&gm)?;
    let gc = comp.smooth.gradient(&cand);
    let lin = Stepsize::restricted_outer(p_k.kind(), &gc, &gm).scale(-1.0 / gg);
    let p_tmp = p_k.add_scaled(-eta, &lin);
    if zero_term {
        return Ok(set.project_p(&p_tmp));
    }
    let (Stepsize::Diagonal(d), Stepsize::Diagonal(_)) = (&p_tmp, p_k) else { unreachable!() };
    let mut out = Vector::zeros(d.len());
    for i in 0..d.len() {
        let gi = gm[i];
        out[i] = if gi == 0.0 {
            d[i]
        } else {
            let v = at.x[i] - d[i] * gi;
            let t = eta * gi * gi / gg;
            let u = comp.term().prox_coord(i, v, t).ok_or_else(|| OsgmError::UnsupportedParametrization("prox term is not separable".into()))?;
            (at.x[i] - u) / gi
        };
    }
    Ok(set.project_p(&Stepsize::Diagonal(out)))
}
