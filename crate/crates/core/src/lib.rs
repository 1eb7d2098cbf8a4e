//! Online scaled gradient methods.
//!
//! The crate learns the stepsize of a first-order method online: every
//! iteration produces a feedback function of the stepsize (hypergradient,
//! heavy-ball potential or proximal feedback), an online learner updates the
//! stepsize on that feedback, and a landscape action (accept, null step or
//! lookahead) decides the next iterate.
//!
//! Modules:
//! - [`problems`]: objectives with oracle counters and a desk-scale suite.
//! - [`stepsizes`]: scalar/diagonal/full stepsizes, norms and projections.
//! - [`feedback`]: feedback functions and their gradients.
//! - [`learners`]: OGD, AdaGrad, online proximal point and proximal gradient.
//! - [`optimizers`]: the method family, baselines, traces and bound checks.
//! - [`dynamics`]: scale-free stepsize dynamics on quadratics.
//! - [`harness`]: LIBSVM I/O, synthetic data and experiment orchestration.
//! - [`acceptance`]: the end-to-end acceptance checks used by tests and the CLI.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod acceptance;
pub mod dynamics;
pub mod error;
pub mod feedback;
pub mod harness;
pub mod learners;
pub mod linalg;
pub mod optimizers;
pub mod problems;
pub mod stepsizes;

pub use error::{OsgmError, Result};
pub use feedback::{EvalPoint, FeedbackEval, HBParams, HBPoint, HBState};
pub use learners::{AdaGradAccumulator, LearnerConfig};
pub use optimizers::{Algorithm, RunConfig, RunStatus, RunTrace};
pub use problems::{CompositeObjective, Objective, OracleCounts, QuadraticProblem};
pub use stepsizes::{CandidateSet, Interval, Parametrization, Stepsize};

pub use nalgebra::{DMatrix, DVector};

/// Dense real vector used throughout.
pub type Vector = DVector<f64>;
/// Dense real matrix used throughout.
pub type Matrix = DMatrix<f64>;
