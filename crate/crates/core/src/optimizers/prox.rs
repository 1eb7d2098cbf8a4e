//! Proximal OSGM for composite objectives `φ = f + w`.

use super::config::{Algorithm, RunConfig};
use super::driver::{resolve_p0, resolve_x0, Driver};
use super::trace::{RunStatus, RunTrace};
use crate::feedback::EvalPoint;
use crate::learners::online_prox_grad_step;
use crate::problems::CompositeObjective;
use crate::{OsgmError, Result};

/// Prescient proximal update of `P`, then a null step on `φ` against the
/// candidate `x − P_{k+1}G_L(x)`.  Records carry `φ(x^k)` and the gradient
/// map `G_L(x^k)` in place of `f` and `∇f`.  Two gradients per iteration.
pub fn run_prox_osgm(comp: &CompositeObjective, cfg: &RunConfig) -> Result<RunTrace> {
    let obj = &comp.smooth;
    let mut drv = Driver::new(obj, cfg, Algorithm::ProxOsgm)?;
    let n = comp.dim();
    let l = comp.smoothness();
    let eta = cfg.eta_p.unwrap_or(1.0 / l);
    if !(eta >= 0.0 && eta <= 1.0 / l * (1.0 + 1e-12)) {
        return Err(OsgmError::InvalidConfig(format!("proximal stepsize learning rate must lie in [0, 1/L], got {eta:e}")));
    }
    let set = cfg.candidate_set.unwrap_or_default();
    let mut p = set.project_p(&resolve_p0(cfg, n, 1.0 / l)?);
    let mut cur = EvalPoint::new(obj, resolve_x0(cfg, n)?);
    let mut phi = cur.f + comp.w_value(&cur.x);
    for k in 1.. {
        let gm = comp.gradient_map_from(&cur.x, &cur.g, l);
        if let Some(status) = drv.open_with(k, phi, &gm, &cur.x, 2) {
            return Ok(drv.finish(status, cur.x, phi, &gm));
        }
        let p_next = match online_prox_grad_step(comp, &cur, &p, eta, &set) {
            Ok(p) => p,
            Err(OsgmError::StationaryPoint(_)) => return Ok(drv.finish(RunStatus::Converged, cur.x, phi, &gm)),
            Err(e) => return Err(e),
        };
        let cand = EvalPoint::new(obj, &cur.x - p_next.apply(&gm)?);
        let phi_cand = cand.f + comp.w_value(&cand.x);
        let accepted = phi_cand <= phi;
        let gg = gm.norm_squared();
        let rec = drv.last();
        rec.feedback = (phi_cand - phi) / gg;
        rec.progress = if accepted { rec.feedback } else { 0.0 };
        rec.step_summary = p.summary();
        rec.accepted = accepted;
        if accepted {
            cur = cand;
            phi = phi_cand;
        }
        p = p_next;
    }
    unreachable!()
}
