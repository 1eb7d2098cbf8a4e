use super::objective::{Metadata, Objective};
use crate::{Matrix, OsgmError, Result, Vector};
use std::fmt;
use std::sync::Arc;

/// A prox-friendly convex term `w`.
pub trait ProxTerm: Send + Sync {
    fn value(&self, x: &Vector) -> f64;

    /// `argmin_z { w(z) + ‖z − x‖²/(2t) }`.
    fn prox(&self, x: &Vector, t: f64) -> Vector;

    /// Scalar prox of the `i`-th term of a separable `w`:
    /// `argmin_u { wᵢ(u) + (u − v)²/(2t) }`.  `None` when `w` is not separable.
    fn prox_coord(&self, _i: usize, _v: f64, _t: f64) -> Option<f64> {
        None
    }

    /// `wᵢ(u)` for separable terms.
    fn value_coord(&self, _i: usize, _u: f64) -> Option<f64> {
        None
    }

    fn is_zero(&self) -> bool {
        false
    }
}

/// `w ≡ 0`.
#[derive(Clone, Copy, Debug, Default)]
pub struct ZeroTerm;

impl ProxTerm for ZeroTerm {
    fn value(&self, _x: &Vector) -> f64 {
        0.0
    }
    fn prox(&self, x: &Vector, _t: f64) -> Vector {
        x.clone()
    }
    fn prox_coord(&self, _i: usize, v: f64, _t: f64) -> Option<f64> {
        Some(v)
    }
    fn value_coord(&self, _i: usize, _u: f64) -> Option<f64> {
        Some(0.0)
    }
    fn is_zero(&self) -> bool {
        true
    }
}

/// `w(x) = c‖x‖₁`.
#[derive(Clone, Copy, Debug)]
pub struct L1Term {
    pub weight: f64,
}

/// `sign(v)·max(|v| − t, 0)`.
pub fn soft_threshold(v: f64, t: f64) -> f64 {
    if v > t {
        v - t
    } else if v < -t {
        v + t
    } else {
        0.0
    }
}

impl ProxTerm for L1Term {
    fn value(&self, x: &Vector) -> f64 {
        self.weight * x.iter().map(|v| v.abs()).sum::<f64>()
    }
    fn prox(&self, x: &Vector, t: f64) -> Vector {
        x.map(|v| soft_threshold(v, self.weight * t))
    }
    fn prox_coord(&self, _i: usize, v: f64, t: f64) -> Option<f64> {
        Some(soft_threshold(v, self.weight * t))
    }
    fn value_coord(&self, _i: usize, u: f64) -> Option<f64> {
        Some(self.weight * u.abs())
    }
    fn is_zero(&self) -> bool {
        self.weight == 0.0
    }
}

/// `φ = f + w` with smooth `f` and prox-friendly `w`.
#[derive(Clone)]
pub struct CompositeObjective {
    pub smooth: Objective,
    term: Arc<dyn ProxTerm>,
    phistar: Option<f64>,
}

impl fmt::Debug for CompositeObjective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CompositeObjective").field("smooth", &self.smooth).field("phistar", &self.phistar).finish()
    }
}

impl CompositeObjective {
    pub fn new(smooth: Objective, term: Arc<dyn ProxTerm>) -> Self {
        CompositeObjective { smooth, term, phistar: None }
    }

    pub fn smooth_only(smooth: Objective) -> Self {
        Self::new(smooth, Arc::new(ZeroTerm))
    }

    pub fn term(&self) -> &dyn ProxTerm {
        self.term.as_ref()
    }

    pub fn dim(&self) -> usize {
        self.smooth.dim()
    }

    pub fn smoothness(&self) -> f64 {
        self.smooth.smoothness()
    }

    pub fn w_value(&self, x: &Vector) -> f64 {
        self.term.value(x)
    }

    /// `prox_{w/γ}(x)` with `t = 1/γ`.
    pub fn prox(&self, x: &Vector, t: f64) -> Vector {
        self.term.prox(x, t)
    }

    /// `φ(x)`, one value oracle of `f`.
    pub fn value(&self, x: &Vector) -> f64 {
        self.smooth.value(x) + self.term.value(x)
    }

    pub fn phistar(&self) -> Option<f64> {
        self.phistar
    }

    pub fn with_phistar(mut self, v: f64) -> Self {
        self.phistar = Some(v);
        self
    }

    /// `G_γ(x) = γ(x − prox_{w/γ}(x − ∇f(x)/γ))` from a known gradient.
    pub fn gradient_map_from(&self, x: &Vector, grad: &Vector, gamma: f64) -> Vector {
        let p = self.term.prox(&(x - grad / gamma), 1.0 / gamma);
        (x - p) * gamma
    }

    /// Reference optimum by accelerated proximal gradient, run until
    /// `‖G_L(x)‖∞ ≤ tol`.  Oracles are charged to a private counter.
    pub fn solve_reference(&self, x0: &Vector, tol: f64, max_iter: usize) -> (Vector, f64) {
        let f = self.smooth.with_fresh_counters();
        let l = f.smoothness();
        let mut x = x0.clone();
        let mut y = x0.clone();
        let mut t = 1.0_f64;
        let mut phi_x = f.value(&x) + self.term.value(&x);
        for _ in 0..max_iter {
            let gy = f.gradient(&y);
            let x_new = self.term.prox(&(&y - &gy / l), 1.0 / l);
            let phi_new = f.value(&x_new) + self.term.value(&x_new);
            // restart when the accelerated sequence loses monotonicity
            let (x_next, restart) = if phi_new <= phi_x { (x_new, false) } else { (x.clone(), true) };
            let t_new = if restart { 1.0 } else { 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt()) };
            y = if restart { x_next.clone() } else { &x_next + (&x_next - &x) * ((t - 1.0) / t_new) };
            t = t_new;
            x = x_next;
            phi_x = phi_x.min(phi_new);
            let gx = f.gradient(&x);
            let gm = self.gradient_map_from(&x, &gx, l);
            if crate::linalg::norm_inf(&gm) <= tol {
                break;
            }
        }
        let phi = f.value(&x) + self.term.value(&x);
        (x, phi)
    }
}

/// Least squares with an ℓ1 penalty: `(1/(2m))‖Ax − b‖² + c‖x‖₁`.
pub fn make_lasso(design: &Matrix, labels: &Vector, l1_weight: f64) -> Result<CompositeObjective> {
    let (m, n) = design.shape();
    if m == 0 || n == 0 {
        return Err(OsgmError::InvalidInput("empty design".into()));
    }
    if labels.len() != m {
        return Err(OsgmError::InvalidInput(format!("{} labels for {m} rows", labels.len())));
    }
    if !(l1_weight >= 0.0) {
        return Err(OsgmError::InvalidParameter("l1 weight must be nonnegative".into()));
    }
    let mf = m as f64;
    let a = design.clone();
    let b = labels.clone();
    let gram = a.transpose() * &a / mf;
    let ev = gram.clone().symmetric_eigen().eigenvalues;
    let l = ev.max().max(f64::MIN_POSITIVE);
    let mu = ev.min();
    let (a1, b1) = (a.clone(), b.clone());
    let (a2, b2) = (a.clone(), b.clone());
    let g3 = gram.clone();
    let meta = Metadata {
        smoothness: l,
        strong_convexity: (mu > 0.0).then_some(mu),
        fstar: None,
        hessian_lipschitz: Some(0.0),
        convex: true,
        quadratic: true,
        minimizer: None,
    };
    let smooth = Objective::from_fns_with_hvp(
        format!("lasso-m{m}-n{n}"),
        n,
        move |x| 0.5 * (&a1 * x - &b1).norm_squared() / mf,
        move |x| a2.transpose() * (&a2 * x - &b2) / mf,
        move |_x, v| &g3 * v,
        meta,
    );
    Ok(CompositeObjective::new(smooth, Arc::new(L1Term { weight: l1_weight })))
}
