//! Rate certificates evaluated on recorded traces.

use super::trace::RunTrace;
use serde::{Deserialize, Serialize};

/// Whether the constants behind a certificate were available exactly.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Certificate {
    Full,
    /// Built from a surrogate constant (the `L/2` branch of `V`).
    Partial,
}

/// Observed quantity against its envelope for every horizon `K = 1, 2, …`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub name: String,
    pub certificate: Certificate,
    pub horizons: Vec<usize>,
    pub observed: Vec<f64>,
    pub envelope: Vec<f64>,
    /// `V` and `Δ` of the heavy-ball reduction, when used.
    pub v: Option<f64>,
    pub delta: Option<f64>,
}

impl BoundReport {
    fn new(name: &str, certificate: Certificate) -> BoundReport {
        BoundReport { name: name.into(), certificate, horizons: Vec::new(), observed: Vec::new(), envelope: Vec::new(), v: None, delta: None }
    }

    fn push(&mut self, k: usize, observed: f64, envelope: f64) {
        self.horizons.push(k);
        self.observed.push(observed);
        self.envelope.push(envelope);
    }

    /// First horizon where `observed > envelope·(1 + rel) + abs`.
    pub fn first_violation(&self, rel: f64, abs: f64) -> Option<usize> {
        self.observed.iter().zip(&self.envelope).position(|(o, e)| !(*o <= e * (1.0 + rel) + abs)).map(|i| self.horizons[i])
    }

    pub fn holds(&self, rel: f64, abs: f64) -> bool {
        self.first_violation(rel, abs).is_none()
    }

    /// Largest `observed/envelope` over horizons with a positive envelope.
    pub fn worst_ratio(&self) -> f64 {
        self.observed.iter().zip(&self.envelope).filter(|(_, e)| **e > 0.0).map(|(o, e)| o / e).fold(f64::NEG_INFINITY, f64::max)
    }
}

/// `f(z^{K+1}) − f* ≤ (f(z¹) − f*)(1 − 1/(8κ))^K`.
pub fn linear_rate_certificate(trace: &RunTrace, fstar: f64, kappa: f64) -> BoundReport {
    let mut rep = BoundReport::new("linear-rate", Certificate::Full);
    let Some(first) = trace.records.first() else { return rep };
    let gap1 = first.f - fstar;
    let q = 1.0 - 1.0 / (8.0 * kappa);
    for (i, r) in trace.records.iter().enumerate().skip(1) {
        rep.push(i, r.f - fstar, gap1 * q.powi(i as i32));
    }
    rep
}

/// `min_{k≤K} ‖g_k‖² ≤ 2L(f(x¹) − f*)/K`, with `g` the gradient (or gradient
/// map) stored in the records and `f` the merit column.
pub fn gradient_envelope(trace: &RunTrace, l: f64, fstar: f64) -> BoundReport {
    let mut rep = BoundReport::new("gradient-envelope", Certificate::Full);
    let Some(first) = trace.records.first() else { return rep };
    let gap1 = first.f - fstar;
    let mut best = f64::INFINITY;
    for (i, r) in trace.records.iter().enumerate() {
        best = best.min(r.gnorm_2 * r.gnorm_2);
        let k = i + 1;
        rep.push(k, best, 2.0 * l * gap1 / k as f64);
    }
    rep
}

/// `min_{k≤K} ‖∇f(x^k)‖² ≤ (f(x¹) − f*)/Σ_{k≤K}(−h_k)` for monotone runs.
pub fn nonconvex_reduction(trace: &RunTrace, fstar: f64) -> BoundReport {
    let mut rep = BoundReport::new("nonconvex-reduction", Certificate::Full);
    let Some(first) = trace.records.first() else { return rep };
    let gap1 = first.f - fstar;
    let mut best = f64::INFINITY;
    let mut cum = 0.0;
    for r in trace.records.iter().filter(|r| r.progress.is_finite()) {
        best = best.min(r.gnorm_2 * r.gnorm_2);
        cum += -r.progress;
        rep.push(r.k, best, if cum > 0.0 { gap1 / cum } else { f64::INFINITY });
    }
    rep
}

/// Heavy-ball reduction from the progress column `b_k`.
///
/// Convex form: `f(z^{K+1}) − f* ≤ (f(z¹) − f*)/(1 + V Σ(−b_k))` with
/// `V = min{(f(z¹) − f*)/(4Δ²), L/2}`.  Without `Δ` only the `L/2` branch is
/// used and the report is partial.  With `μ` the strongly convex form
/// `(f(z¹) − f*)(1 − (μ/K)Σ(−b_k))^K` is reported instead.
pub fn heavy_ball_reduction(trace: &RunTrace, fstar: f64, l: f64, mu: Option<f64>, delta: Option<f64>) -> BoundReport {
    let (name, cert) = match (mu, delta) {
        (Some(_), _) => ("heavy-ball-reduction-scvx", Certificate::Full),
        (None, Some(_)) => ("heavy-ball-reduction-cvx", Certificate::Full),
        (None, None) => ("heavy-ball-reduction-cvx", Certificate::Partial),
    };
    let mut rep = BoundReport::new(name, cert);
    let Some(first) = trace.records.first() else { return rep };
    let gap1 = first.f - fstar;
    let v = match delta {
        Some(d) if d > 0.0 => (gap1 / (4.0 * d * d)).min(l / 2.0),
        _ => l / 2.0,
    };
    rep.v = Some(v);
    rep.delta = delta;
    let mut cum = 0.0;
    let recs = &trace.records;
    for (i, r) in recs.iter().enumerate() {
        if i + 1 >= recs.len() || !r.progress.is_finite() {
            break;
        }
        cum += -r.progress;
        let k = i + 1;
        let env = match mu {
            Some(m) => gap1 * (1.0 - m * cum / k as f64).max(0.0).powi(k as i32),
            None => gap1 / (1.0 + v * cum),
        };
        rep.push(k, recs[i + 1].f - fstar, env);
    }
    rep
}

/// `Δ` for a quadratic with strong convexity `μ`: the level set through
/// `x¹` is an ellipsoid of radius `√(2(f(x¹) − f*)/μ)`.
pub fn quadratic_level_radius(gap1: f64, mu: f64) -> f64 {
    (2.0 * gap1 / mu).sqrt()
}

/// Difference in log space between the product of per-step gap ratios and
/// the end-to-end ratio, relative to the latter.  Only meaningful when every
/// recorded gap is positive.
pub fn chained_contraction_error(trace: &RunTrace, fstar: f64) -> f64 {
    let gaps: Vec<f64> = trace.records.iter().map(|r| r.f - fstar).collect();
    if gaps.len() < 2 || gaps.iter().any(|g| !(*g > 0.0)) {
        return f64::NAN;
    }
    let chained: f64 = gaps.windows(2).map(|w| (w[1] / w[0]).ln()).sum();
    let direct = (gaps[gaps.len() - 1] / gaps[0]).ln();
    (chained - direct).abs() / direct.abs().max(1.0)
}
