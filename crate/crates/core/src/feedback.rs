//! Feedback functions of the stepsize and their gradients.
//!
//! All functions take the current point with its value and gradient already
//! evaluated ([`EvalPoint`]) and spend exactly one fresh gradient oracle at the
//! proposed point, which they hand back so the optimizer can reuse it.

use crate::linalg::norm_inf;
use crate::problems::{CompositeObjective, Objective};
use crate::stepsizes::{product_dual_norm, Parametrization, Stepsize};
use crate::{Matrix, OsgmError, Result, Vector};

/// Denominators below this are treated as a stationary state.
pub const DENOMINATOR_GUARD: f64 = 1e-30;

/// A point with its function value and gradient.
#[derive(Clone, Debug, PartialEq)]
pub struct EvalPoint {
    pub x: Vector,
    pub f: f64,
    pub g: Vector,
}

impl EvalPoint {
    /// Evaluates `f` and `∇f` at `x` (one gradient oracle).
    pub fn new(obj: &Objective, x: Vector) -> EvalPoint {
        let (f, g) = obj.eval(&x);
        EvalPoint { x, f, g }
    }

    pub fn grad_norm_sq(&self) -> f64 {
        self.g.norm_squared()
    }

    pub fn grad_norm_inf(&self) -> f64 {
        norm_inf(&self.g)
    }
}

/// Value and gradient of a feedback function in the stepsize's parametrization.
#[derive(Clone, Debug, PartialEq)]
pub struct FeedbackEval {
    pub value: f64,
    pub grad_p: Stepsize,
    pub grad_beta: Option<f64>,
}

impl FeedbackEval {
    /// `‖(∇_P h, ∇_β h)‖*`; a missing `β` component counts as zero.
    pub fn dual_norm(&self, l: f64) -> f64 {
        product_dual_norm(&self.grad_p, self.grad_beta.unwrap_or(0.0), l)
    }
}

/// Hypergradient feedback at a point, with the evaluated proposal `x − P∇f(x)`.
#[derive(Clone, Debug)]
pub struct HypergradFeedback {
    pub feedback: FeedbackEval,
    pub proposal: EvalPoint,
}

fn stationary_check(gg: f64) -> Result<()> {
    if gg > 0.0 && gg.is_finite() {
        Ok(())
    } else {
        Err(OsgmError::StationaryPoint(gg.sqrt()))
    }
}

/// `h_x(P) = (f(x − P∇f(x)) − f(x))/‖∇f(x)‖²` and its restricted gradient
/// `−∇f(x⁺)∇f(x)ᵀ/‖∇f(x)‖²`.
pub fn hypergrad_feedback(obj: &Objective, at: &EvalPoint, p: &Stepsize) -> Result<HypergradFeedback> {
    let gg = at.grad_norm_sq();
    stationary_check(gg)?;
    let xp = &at.x - p.apply(&at.g)?;
    let proposal = EvalPoint::new(obj, xp);
    let value = (proposal.f - at.f) / gg;
    let grad_p = Stepsize::restricted_outer(p.kind(), &proposal.g, &at.g).scale(-1.0 / gg);
    Ok(HypergradFeedback { feedback: FeedbackEval { value, grad_p, grad_beta: None }, proposal })
}

/// `h^λ_x(P) = h_x(P) + (λ/2)‖P − I/L‖²`.
pub fn regularized_feedback(obj: &Objective, at: &EvalPoint, p: &Stepsize, lambda: f64) -> Result<HypergradFeedback> {
    if !(lambda >= 0.0) {
        return Err(OsgmError::InvalidParameter(format!("λ must be nonnegative, got {lambda}")));
    }
    let mut out = hypergrad_feedback(obj, at, p)?;
    if lambda > 0.0 {
        let n = at.x.len();
        let center = Stepsize::scaled_identity(p.kind(), n, 1.0 / obj.smoothness());
        let diff = p.add_scaled(-1.0, &center);
        out.feedback.value += 0.5 * lambda * diff.norm_squared();
        out.feedback.grad_p = out.feedback.grad_p.add_scaled(lambda, &diff);
    }
    Ok(out)
}

/// Weak-convexity modulus of `h_x` over a candidate set of diameter `diam`.
///
/// Starts from `L` and tightens it with the curvature bound when a Hessian
/// Lipschitz constant and Hessian-vector products are available, and with the
/// PL bound when a strong convexity constant is also known.  The scalar path
/// costs one hvp; diagonal and full stepsizes assemble the Hessian from `n` hvps.
pub fn weak_convexity_bound(obj: &Objective, at: &EvalPoint, diam: f64, kind: Parametrization) -> f64 {
    let l = obj.smoothness();
    let gnorm = at.g.norm();
    let mut lam = l;
    if let Some(h) = obj.hessian_lipschitz() {
        if obj.has_hvp() && gnorm > 0.0 {
            let curvature_min = match kind {
                Parametrization::Scalar => {
                    let gh = &at.g / gnorm;
                    obj.hvp(&at.x, &gh).map(|hg| gh.dot(&hg))
                }
                Parametrization::Diagonal | Parametrization::Full => {
                    let n = at.x.len();
                    let mut hess = Matrix::zeros(n, n);
                    let mut ok = true;
                    for j in 0..n {
                        let e = Vector::from_fn(n, |i, _| if i == j { 1.0 } else { 0.0 });
                        match obj.hvp(&at.x, &e) {
                            Some(c) => hess.set_column(j, &c),
                            None => ok = false,
                        }
                    }
                    ok.then(|| {
                        let hess = (&hess + hess.transpose()) * 0.5;
                        if kind == Parametrization::Diagonal {
                            let gh = &at.g / gnorm;
                            let d = Matrix::from_diagonal(&gh);
                            (&d * hess * &d).symmetric_eigen().eigenvalues.min()
                        } else {
                            let m = hess.symmetric_eigen().eigenvalues.min();
                            if n >= 2 {
                                m.min(0.0)
                            } else {
                                m
                            }
                        }
                    })
                }
            };
            if let Some(c) = curvature_min {
                lam = lam.min((-c + h * diam * gnorm).max(0.0));
            }
        }
        if let Some(mu) = obj.strong_convexity() {
            if mu > 0.0 {
                lam = lam.min((h / mu + h * diam) * gnorm);
            }
        }
    }
    lam.clamp(0.0, l)
}

/// Heavy-ball state `z = (z₁, z₂) = (x, x⁻)`.
#[derive(Clone, Debug, PartialEq)]
pub struct HBState {
    pub z1: Vector,
    pub z2: Vector,
}

impl HBState {
    pub fn new(z1: Vector, z2: Vector) -> Result<HBState> {
        if z1.len() != z2.len() {
            return Err(OsgmError::InvalidInput("z1 and z2 differ in dimension".into()));
        }
        Ok(HBState { z1, z2 })
    }
}

/// Potential weight `ω` and denominator weight `τ`.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct HBParams {
    pub omega: f64,
    pub tau: f64,
}

impl HBParams {
    /// Checks `τ ≥ 2Lω` and `τ ≥ 2L²`.
    pub fn new(omega: f64, tau: f64, l: f64) -> Result<HBParams> {
        if !(omega > 0.0) || !(tau > 0.0) || !(l > 0.0) {
            return Err(OsgmError::InvalidParameter("ω, τ and L must be positive".into()));
        }
        if tau < 2.0 * l * omega {
            return Err(OsgmError::InvalidParameter(format!("τ = {tau} < 2Lω = {}", 2.0 * l * omega)));
        }
        if tau < 2.0 * l * l {
            return Err(OsgmError::InvalidParameter(format!("τ = {tau} < 2L² = {}", 2.0 * l * l)));
        }
        Ok(HBParams { omega, tau })
    }

    /// `ω = 3L`, `τ = 16L²`.
    pub fn defaults(l: f64) -> HBParams {
        HBParams { omega: 3.0 * l, tau: 16.0 * l * l }
    }
}

/// A heavy-ball state with `f` and `∇f` known at `z₁`.
#[derive(Clone, Debug, PartialEq)]
pub struct HBPoint {
    pub z1: EvalPoint,
    pub z2: Vector,
}

impl HBPoint {
    /// Evaluates the state's leading point (one gradient oracle).
    pub fn new(obj: &Objective, z: &HBState) -> HBPoint {
        HBPoint { z1: EvalPoint::new(obj, z.z1.clone()), z2: z.z2.clone() }
    }

    pub fn momentum(&self) -> Vector {
        &self.z1.x - &self.z2
    }

    /// `‖∇f(z₁)‖² + (τ/2)‖z₁ − z₂‖²`.
    pub fn denominator(&self, tau: f64) -> f64 {
        self.z1.grad_norm_sq() + 0.5 * tau * (&self.z1.x - &self.z2).norm_squared()
    }

    /// `f(z₁) + (ω/2)‖z₁ − z₂‖²`, the potential up to the constant `f*`.
    pub fn shifted_potential(&self, omega: f64) -> f64 {
        self.z1.f + 0.5 * omega * (&self.z1.x - &self.z2).norm_squared()
    }

    pub fn state(&self) -> HBState {
        HBState { z1: self.z1.x.clone(), z2: self.z2.clone() }
    }
}

/// `φ_ω(z) = f(z₁) − f* + (ω/2)‖z₁ − z₂‖²`; without a known `f*` the
/// unshifted `f(z₁) + (ω/2)‖z₁ − z₂‖²` is returned.  One value oracle.
pub fn hb_potential(obj: &Objective, z: &HBState, omega: f64) -> f64 {
    obj.value(&z.z1) - obj.fstar().unwrap_or(0.0) + 0.5 * omega * (&z.z1 - &z.z2).norm_squared()
}

/// Heavy-ball feedback with the evaluated proposal `z⁺ = (z₁ − P∇f(z₁) + β(z₁ − z₂), z₁)`.
#[derive(Clone, Debug)]
pub struct HBFeedback {
    pub feedback: FeedbackEval,
    /// Leading point of the proposal; its reference point is the current `z₁`.
    pub proposal: EvalPoint,
    pub denominator: f64,
}

/// `h_z(P, β) = (φ_ω(z⁺) − φ_ω(z))/(‖∇f(z₁)‖² + (τ/2)‖z₁ − z₂‖²)` with gradient
/// `(−r∇f(z₁)ᵀ/den, ⟨r, z₁ − z₂⟩/den)`, `r = ∇f(z⁺₁) + ω(z⁺₁ − z₁)`.
pub fn hb_feedback(obj: &Objective, z: &HBPoint, p: &Stepsize, beta: f64, params: &HBParams) -> Result<HBFeedback> {
    let d = z.momentum();
    let den = z.z1.grad_norm_sq() + 0.5 * params.tau * d.norm_squared();
    if !(den >= DENOMINATOR_GUARD) || !den.is_finite() {
        return Err(OsgmError::StationaryPoint(den.sqrt()));
    }
    let zp = &z.z1.x - p.apply(&z.z1.g)? + &d * beta;
    let proposal = EvalPoint::new(obj, zp);
    let step = &proposal.x - &z.z1.x;
    let dphi = (proposal.f - z.z1.f) + 0.5 * params.omega * (step.norm_squared() - d.norm_squared());
    let r = &proposal.g + &step * params.omega;
    let grad_p = Stepsize::restricted_outer(p.kind(), &r, &z.z1.g).scale(-1.0 / den);
    let grad_beta = r.dot(&d) / den;
    Ok(HBFeedback { feedback: FeedbackEval { value: dphi / den, grad_p, grad_beta: Some(grad_beta) }, proposal, denominator: den })
}

/// `G_γ(x) = γ(x − prox_{w/γ}(x − ∇f(x)/γ))`.
pub fn gradient_map(comp: &CompositeObjective, at: &EvalPoint, gamma: f64) -> Result<Vector> {
    if !(gamma > 0.0) {
        return Err(OsgmError::InvalidParameter(format!("γ must be positive, got {gamma}")));
    }
    Ok(comp.gradient_map_from(&at.x, &at.g, gamma))
}

/// Proximal hypergradient feedback `(φ(x − P G_L(x)) − φ(x))/‖G_L(x)‖²`.
/// One value oracle of `f` at the candidate.
pub fn prox_feedback(comp: &CompositeObjective, at: &EvalPoint, p: &Stepsize) -> Result<f64> {
    let gm = gradient_map(comp, at, comp.smoothness())?;
    let gg = gm.norm_squared();
    stationary_check(gg)?;
    let cand = &at.x - p.apply(&gm)?;
    let phi_x = at.f + comp.w_value(&at.x);
    Ok((comp.value(&cand) - phi_x) / gg)
}

/// Gradient of the smooth part `ℓ(P) = f(x − P G_L(x))/‖G_L(x)‖²`:
/// `−∇f(x − P G)Gᵀ/‖G‖²`, restricted.  One gradient oracle.
pub fn prox_feedback_linearized_grad(comp: &CompositeObjective, at: &EvalPoint, p: &Stepsize) -> Result<Stepsize> {
    let gm = gradient_map(comp, at, comp.smoothness())?;
    let gg = gm.norm_squared();
    stationary_check(gg)?;
    let cand = &at.x - p.apply(&gm)?;
    let gc = comp.smooth.gradient(&cand);
    Ok(Stepsize::restricted_outer(p.kind(), &gc, &gm).scale(-1.0 / gg))
}

/// `‖∇f(x − α∇f(x))‖/‖∇f(x)‖`.  One gradient oracle.
pub fn gradnorm_feedback(obj: &Objective, at: &EvalPoint, alpha: f64) -> Result<f64> {
    let gg = at.grad_norm_sq();
    stationary_check(gg)?;
    let xp = &at.x - &at.g * alpha;
    Ok(obj.gradient(&xp).norm() / gg.sqrt())
}
