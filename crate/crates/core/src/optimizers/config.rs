use crate::feedback::HBParams;
use crate::stepsizes::{CandidateSet, Parametrization, Stepsize};
use crate::{OsgmError, Result, Vector};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// Every method the crate can run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    Gd,
    GdHb,
    AgdCvx,
    AgdScvx,
    Adam,
    Adagrad,
    ClassicHdm,
    OsgmH,
    OsgmHMonotone,
    OsgmHLookahead,
    OsgmHNonconvex,
    OsgmBest,
    OsgmHbAdagrad,
    OsgmBb,
    ProxOsgm,
}

impl Algorithm {
    pub const ALL: [Algorithm; 15] = [
        Algorithm::Gd,
        Algorithm::GdHb,
        Algorithm::AgdCvx,
        Algorithm::AgdScvx,
        Algorithm::Adam,
        Algorithm::Adagrad,
        Algorithm::ClassicHdm,
        Algorithm::OsgmH,
        Algorithm::OsgmHMonotone,
        Algorithm::OsgmHLookahead,
        Algorithm::OsgmHNonconvex,
        Algorithm::OsgmBest,
        Algorithm::OsgmHbAdagrad,
        Algorithm::OsgmBb,
        Algorithm::ProxOsgm,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::Gd => "gd",
            Algorithm::GdHb => "gd-hb",
            Algorithm::AgdCvx => "agd-cvx",
            Algorithm::AgdScvx => "agd-scvx",
            Algorithm::Adam => "adam",
            Algorithm::Adagrad => "adagrad",
            Algorithm::ClassicHdm => "classic-hdm",
            Algorithm::OsgmH => "osgm-h",
            Algorithm::OsgmHMonotone => "osgm-h-monotone",
            Algorithm::OsgmHLookahead => "osgm-h-lookahead",
            Algorithm::OsgmHNonconvex => "osgm-h-nonconvex",
            Algorithm::OsgmBest => "osgm-best",
            Algorithm::OsgmHbAdagrad => "osgm-hb-adagrad",
            Algorithm::OsgmBb => "osgm-bb",
            Algorithm::ProxOsgm => "prox-osgm",
        }
    }

    /// Methods driven by a learned stepsize.
    pub fn is_osgm(&self) -> bool {
        matches!(
            self,
            Algorithm::ClassicHdm
                | Algorithm::OsgmH
                | Algorithm::OsgmHMonotone
                | Algorithm::OsgmHLookahead
                | Algorithm::OsgmHNonconvex
                | Algorithm::OsgmBest
                | Algorithm::OsgmHbAdagrad
                | Algorithm::OsgmBb
                | Algorithm::ProxOsgm
        )
    }

    /// Whether the trace's merit column is guaranteed nonincreasing.
    pub fn is_monotone(&self) -> bool {
        matches!(
            self,
            Algorithm::OsgmHMonotone
                | Algorithm::OsgmHLookahead
                | Algorithm::OsgmHNonconvex
                | Algorithm::OsgmBest
                | Algorithm::OsgmHbAdagrad
                | Algorithm::OsgmBb
                | Algorithm::ProxOsgm
        )
    }

    pub fn uses_heavy_ball_potential(&self) -> bool {
        matches!(self, Algorithm::OsgmBest | Algorithm::OsgmHbAdagrad)
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = OsgmError;
    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL.iter().copied().find(|a| a.name() == s).ok_or_else(|| OsgmError::InvalidConfig(format!("unknown algorithm `{s}`")))
    }
}

/// Named choices for the online learning rates.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EtaPreset {
    /// Per-algorithm default (see [`RunConfig::resolved_eta`]).
    #[default]
    Default,
    /// Heavy-ball: `η_P = η_β/L² = 1/(2L)`.
    HalfInverseL,
    /// Heavy-ball: `η_P = η_β/L² = 1/(L + ω)`, the inverse smoothness of the potential.
    InversePotentialL,
    /// Nonconvex lookahead: `η = 1/(4L)`.
    QuarterInverseL,
}

impl FromStr for EtaPreset {
    type Err = OsgmError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "default" => Ok(EtaPreset::Default),
            "half-inverse-l" => Ok(EtaPreset::HalfInverseL),
            "inverse-potential-l" => Ok(EtaPreset::InversePotentialL),
            "quarter-inverse-l" => Ok(EtaPreset::QuarterInverseL),
            _ => Err(OsgmError::InvalidConfig(format!("unknown eta preset `{s}`"))),
        }
    }
}

/// How the nonconvex method picks its regularization weight.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LambdaPolicy {
    /// Weak-convexity estimate at every iterate.
    #[default]
    Adaptive,
    /// Fixed weight, clamped to `[0, L]`.
    Fixed(f64),
}

/// Everything a single run needs besides the objective.
///
/// Fields left as `None` are filled from the objective's metadata when the
/// run starts; the resolved values are reported on the trace.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub algorithm: Algorithm,
    /// Starting point; drawn from `seed` as a unit vector when absent.
    pub x0: Option<Vector>,
    pub p0: Option<Stepsize>,
    pub beta0: Option<f64>,
    pub parametrization: Parametrization,
    pub eta_p: Option<f64>,
    pub eta_beta: Option<f64>,
    pub eta_preset: EtaPreset,
    pub candidate_set: Option<CandidateSet>,
    pub hb: Option<HBParams>,
    pub lambda: LambdaPolicy,
    /// Stepsize of the baselines.
    pub lr: Option<f64>,
    /// Momentum of GD-HB.
    pub momentum: Option<f64>,
    pub tol: f64,
    /// Maximum number of gradient oracles.
    pub budget: u64,
    pub max_iters: usize,
    pub seed: u64,
    pub record_iterates: bool,
}

impl RunConfig {
    pub const DEFAULT_TOL: f64 = 1e-3;
    pub const DEFAULT_BUDGET: u64 = 1000;
    pub const DEFAULT_NONCONVEX_BUDGET: u64 = 2000;

    pub fn new(algorithm: Algorithm) -> RunConfig {
        RunConfig {
            algorithm,
            x0: None,
            p0: None,
            beta0: None,
            parametrization: Parametrization::Diagonal,
            eta_p: None,
            eta_beta: None,
            eta_preset: EtaPreset::Default,
            candidate_set: None,
            hb: None,
            lambda: LambdaPolicy::Adaptive,
            lr: None,
            momentum: None,
            tol: Self::DEFAULT_TOL,
            budget: Self::DEFAULT_BUDGET,
            max_iters: 1_000_000,
            seed: 0,
            record_iterates: false,
        }
    }

    pub fn with_x0(mut self, x0: Vector) -> Self {
        self.x0 = Some(x0);
        self
    }

    pub fn with_p0(mut self, p0: Stepsize) -> Self {
        self.parametrization = p0.kind();
        self.p0 = Some(p0);
        self
    }

    pub fn with_beta0(mut self, beta0: f64) -> Self {
        self.beta0 = Some(beta0);
        self
    }

    pub fn with_parametrization(mut self, kind: Parametrization) -> Self {
        self.parametrization = kind;
        self
    }

    pub fn with_eta(mut self, eta_p: f64) -> Self {
        self.eta_p = Some(eta_p);
        self
    }

    pub fn with_eta_beta(mut self, eta_beta: f64) -> Self {
        self.eta_beta = Some(eta_beta);
        self
    }

    pub fn with_preset(mut self, preset: EtaPreset) -> Self {
        self.eta_preset = preset;
        self
    }

    pub fn with_candidate_set(mut self, set: CandidateSet) -> Self {
        self.candidate_set = Some(set);
        self
    }

    pub fn with_hb(mut self, hb: HBParams) -> Self {
        self.hb = Some(hb);
        self
    }

    pub fn with_lambda(mut self, lambda: LambdaPolicy) -> Self {
        self.lambda = lambda;
        self
    }

    pub fn with_lr(mut self, lr: f64) -> Self {
        self.lr = Some(lr);
        self
    }

    pub fn with_momentum(mut self, momentum: f64) -> Self {
        self.momentum = Some(momentum);
        self
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_budget(mut self, budget: u64) -> Self {
        self.budget = budget;
        self
    }

    pub fn with_max_iters(mut self, max_iters: usize) -> Self {
        self.max_iters = max_iters;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn recording_iterates(mut self) -> Self {
        self.record_iterates = true;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.budget == 0 {
            return Err(OsgmError::InvalidConfig("budget must be positive".into()));
        }
        if !(self.tol > 0.0) {
            return Err(OsgmError::InvalidConfig(format!("tolerance must be positive, got {}", self.tol)));
        }
        if let Some(p0) = &self.p0 {
            if p0.kind() != self.parametrization {
                return Err(OsgmError::InvalidConfig(format!(
                    "initial stepsize is {} but the run is configured as {}",
                    p0.kind(),
                    self.parametrization
                )));
            }
        }
        for (name, v) in [("eta_p", self.eta_p), ("eta_beta", self.eta_beta), ("lr", self.lr)] {
            if let Some(v) = v {
                if !(v >= 0.0) {
                    return Err(OsgmError::InvalidConfig(format!("{name} must be nonnegative, got {v}")));
                }
            }
        }
        Ok(())
    }

    /// Learning rates `(η_P, η_β)` for the configured algorithm.
    pub fn resolved_eta(&self, l: f64, hb: &HBParams) -> (f64, f64) {
        let eta_p = self.eta_p.unwrap_or_else(|| match (self.algorithm, self.eta_preset) {
            (Algorithm::OsgmBest, EtaPreset::InversePotentialL) => 1.0 / (l + hb.omega),
            (Algorithm::OsgmBest, _) => 1.0 / (2.0 * l),
            (Algorithm::OsgmHNonconvex, EtaPreset::QuarterInverseL) => 1.0 / (4.0 * l),
            (Algorithm::OsgmHNonconvex, _) => 1.0 / (2.0 * l),
            _ => 1.0 / l,
        });
        let eta_beta = self.eta_beta.unwrap_or(match self.algorithm {
            Algorithm::OsgmBest => l * l * eta_p,
            _ => eta_p,
        });
        (eta_p, eta_beta)
    }
}
