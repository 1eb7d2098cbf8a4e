//! The learned-stepsize family, fixed-rule baselines, traces and certificates.

mod agd;
mod baselines;
mod bounds;
mod config;
mod driver;
mod heavy_ball;
mod hypergrad;
mod prox;
mod trace;

pub use agd::{agd_contraction_factor, agd_potential_trace, agd_quadratic_potential, agd_step};
pub use baselines::{
    run_adagrad, run_adam, run_agd_cvx, run_agd_scvx, run_gd, run_gd_hb, ADAGRAD_EPSILON, ADAM_BETA1, ADAM_BETA2, ADAM_EPSILON, DEFAULT_HB_MOMENTUM,
};
pub use bounds::{
    chained_contraction_error, gradient_envelope, heavy_ball_reduction, linear_rate_certificate, nonconvex_reduction, quadratic_level_radius,
    BoundReport, Certificate,
};
pub use config::{Algorithm, EtaPreset, LambdaPolicy, RunConfig};
pub use driver::resolve_x0;
pub use heavy_ball::{comparator_feedback, osgm_best_memory, run_osgm_best, run_osgm_hb_adagrad};
pub use hypergrad::{run_classic_hdm, run_osgm_bb, run_osgm_h, run_osgm_h_nonconvex, Landscape};
pub use prox::run_prox_osgm;
pub use trace::{fmt_num, IterRecord, RunStatus, RunSummary, RunTrace, TRACE_CSV_HEADER};

use crate::problems::{CompositeObjective, Objective};
use crate::{OsgmError, Result};

/// Runs `cfg.algorithm` on a smooth objective.
pub fn run(obj: &Objective, cfg: &RunConfig) -> Result<RunTrace> {
    match cfg.algorithm {
        Algorithm::Gd => run_gd(obj, cfg),
        Algorithm::GdHb => run_gd_hb(obj, cfg),
        Algorithm::AgdCvx => run_agd_cvx(obj, cfg),
        Algorithm::AgdScvx => run_agd_scvx(obj, cfg),
        Algorithm::Adam => run_adam(obj, cfg),
        Algorithm::Adagrad => run_adagrad(obj, cfg),
        Algorithm::ClassicHdm => run_classic_hdm(obj, cfg),
        Algorithm::OsgmH => run_osgm_h(obj, cfg, Landscape::Vanilla),
        Algorithm::OsgmHMonotone => run_osgm_h(obj, cfg, Landscape::Monotone),
        Algorithm::OsgmHLookahead => run_osgm_h(obj, cfg, Landscape::Lookahead),
        Algorithm::OsgmHNonconvex => run_osgm_h_nonconvex(obj, cfg),
        Algorithm::OsgmBest => run_osgm_best(obj, cfg),
        Algorithm::OsgmHbAdagrad => run_osgm_hb_adagrad(obj, cfg),
        Algorithm::OsgmBb => run_osgm_bb(obj, cfg),
        Algorithm::ProxOsgm => run_prox_osgm(&CompositeObjective::smooth_only(obj.clone()), cfg),
    }
}

/// Runs `cfg.algorithm` on a composite objective.  Only the proximal method
/// handles a nonzero `w`; the others run on the smooth part when `w ≡ 0`.
pub fn run_composite(comp: &CompositeObjective, cfg: &RunConfig) -> Result<RunTrace> {
    match cfg.algorithm {
        Algorithm::ProxOsgm => run_prox_osgm(comp, cfg),
        _ if comp.term().is_zero() => run(&comp.smooth, cfg),
        a => Err(OsgmError::InvalidConfig(format!("{a} cannot handle a nonsmooth term"))),
    }
}
