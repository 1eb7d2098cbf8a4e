use crate::Vector;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

/// A twice-differentiable function given by its oracles.
pub trait SmoothFunction: Send + Sync {
    fn dim(&self) -> usize;
    fn value(&self, x: &Vector) -> f64;
    fn gradient(&self, x: &Vector) -> Vector;

    fn value_gradient(&self, x: &Vector) -> (f64, Vector) {
        (self.value(x), self.gradient(x))
    }

    /// Hessian-vector product, when the function provides one.
    fn hvp(&self, _x: &Vector, _v: &Vector) -> Option<Vector> {
        None
    }

    fn has_hvp(&self) -> bool {
        false
    }
}

/// Constants describing an objective.
#[derive(Clone, Debug, PartialEq)]
pub struct Metadata {
    pub smoothness: f64,
    pub strong_convexity: Option<f64>,
    pub fstar: Option<f64>,
    pub hessian_lipschitz: Option<f64>,
    pub convex: bool,
    /// Hessian is constant, so one hvp determines the curvature along a direction.
    pub quadratic: bool,
    pub minimizer: Option<Vector>,
}

impl Metadata {
    pub fn smooth(l: f64) -> Self {
        Metadata { smoothness: l, strong_convexity: None, fstar: None, hessian_lipschitz: None, convex: false, quadratic: false, minimizer: None }
    }
}

/// Snapshot of the oracle counters.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleCounts {
    pub values: u64,
    pub gradients: u64,
    pub hvps: u64,
}

impl std::ops::Sub for OracleCounts {
    type Output = OracleCounts;
    fn sub(self, o: OracleCounts) -> OracleCounts {
        OracleCounts { values: self.values - o.values, gradients: self.gradients - o.gradients, hvps: self.hvps - o.hvps }
    }
}

#[derive(Debug, Default)]
struct Counters {
    values: AtomicU64,
    gradients: AtomicU64,
    hvps: AtomicU64,
}

/// An objective together with its metadata and oracle counters.
///
/// Cloning shares the counters; use [`Objective::with_fresh_counters`] to get an
/// independent tally over the same function.  A joint value-and-gradient call
/// counts once in each of the value and gradient counters.
#[derive(Clone)]
pub struct Objective {
    name: String,
    func: Arc<dyn SmoothFunction>,
    meta: Metadata,
    counters: Arc<Counters>,
}

impl fmt::Debug for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Objective")
            .field("name", &self.name)
            .field("dim", &self.dim())
            .field("meta", &self.meta)
            .field("counts", &self.counts())
            .finish()
    }
}

impl Objective {
    pub fn new(name: impl Into<String>, func: Arc<dyn SmoothFunction>, meta: Metadata) -> Self {
        Objective { name: name.into(), func, meta, counters: Arc::new(Counters::default()) }
    }

    /// Builds an objective from closures.
    pub fn from_fns<V, G>(name: impl Into<String>, dim: usize, value: V, gradient: G, meta: Metadata) -> Self
    where
        V: Fn(&Vector) -> f64 + Send + Sync + 'static,
        G: Fn(&Vector) -> Vector + Send + Sync + 'static,
    {
        let func = ClosureFunction { dim, value: Box::new(value), gradient: Box::new(gradient), hvp: None };
        Self::new(name, Arc::new(func), meta)
    }

    /// Builds an objective from closures including a Hessian-vector product.
    pub fn from_fns_with_hvp<V, G, H>(name: impl Into<String>, dim: usize, value: V, gradient: G, hvp: H, meta: Metadata) -> Self
    where
        V: Fn(&Vector) -> f64 + Send + Sync + 'static,
        G: Fn(&Vector) -> Vector + Send + Sync + 'static,
        H: Fn(&Vector, &Vector) -> Vector + Send + Sync + 'static,
    {
        let func = ClosureFunction { dim, value: Box::new(value), gradient: Box::new(gradient), hvp: Some(Box::new(hvp)) };
        Self::new(name, Arc::new(func), meta)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.func.dim()
    }

    pub fn meta(&self) -> &Metadata {
        &self.meta
    }

    pub fn smoothness(&self) -> f64 {
        self.meta.smoothness
    }

    pub fn strong_convexity(&self) -> Option<f64> {
        self.meta.strong_convexity
    }

    pub fn fstar(&self) -> Option<f64> {
        self.meta.fstar
    }

    pub fn hessian_lipschitz(&self) -> Option<f64> {
        self.meta.hessian_lipschitz
    }

    pub fn is_convex(&self) -> bool {
        self.meta.convex
    }

    pub fn has_hvp(&self) -> bool {
        self.func.has_hvp()
    }

    /// Same function and metadata with counters starting from zero.
    pub fn with_fresh_counters(&self) -> Objective {
        Objective { name: self.name.clone(), func: Arc::clone(&self.func), meta: self.meta.clone(), counters: Arc::new(Counters::default()) }
    }

    pub fn with_fstar(mut self, fstar: f64) -> Objective {
        self.meta.fstar = Some(fstar);
        self
    }

    pub fn with_meta(mut self, meta: Metadata) -> Objective {
        self.meta = meta;
        self
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Objective {
        self.name = name.into();
        self
    }

    fn check_dim(&self, x: &Vector) {
        assert_eq!(x.len(), self.dim(), "objective `{}`: dimension mismatch", self.name);
    }

    pub fn value(&self, x: &Vector) -> f64 {
        self.check_dim(x);
        self.counters.values.fetch_add(1, Ordering::Relaxed);
        self.func.value(x)
    }

    pub fn gradient(&self, x: &Vector) -> Vector {
        self.check_dim(x);
        self.counters.gradients.fetch_add(1, Ordering::Relaxed);
        self.func.gradient(x)
    }

    /// Value and gradient together.
    pub fn eval(&self, x: &Vector) -> (f64, Vector) {
        self.check_dim(x);
        self.counters.values.fetch_add(1, Ordering::Relaxed);
        self.counters.gradients.fetch_add(1, Ordering::Relaxed);
        self.func.value_gradient(x)
    }

    pub fn hvp(&self, x: &Vector, v: &Vector) -> Option<Vector> {
        self.check_dim(x);
        if !self.func.has_hvp() {
            return None;
        }
        self.counters.hvps.fetch_add(1, Ordering::Relaxed);
        self.func.hvp(x, v)
    }

    pub fn counts(&self) -> OracleCounts {
        OracleCounts {
            values: self.counters.values.load(Ordering::Relaxed),
            gradients: self.counters.gradients.load(Ordering::Relaxed),
            hvps: self.counters.hvps.load(Ordering::Relaxed),
        }
    }
}

type ValueFn = Box<dyn Fn(&Vector) -> f64 + Send + Sync>;
type GradFn = Box<dyn Fn(&Vector) -> Vector + Send + Sync>;
type HvpFn = Box<dyn Fn(&Vector, &Vector) -> Vector + Send + Sync>;

struct ClosureFunction {
    dim: usize,
    value: ValueFn,
    gradient: GradFn,
    hvp: Option<HvpFn>,
}

impl SmoothFunction for ClosureFunction {
    fn dim(&self) -> usize {
        self.dim
    }
    fn value(&self, x: &Vector) -> f64 {
        (self.value)(x)
    }
    fn gradient(&self, x: &Vector) -> Vector {
        (self.gradient)(x)
    }
    fn hvp(&self, x: &Vector, v: &Vector) -> Option<Vector> {
        self.hvp.as_ref().map(|h| h(x, v))
    }
    fn has_hvp(&self) -> bool {
        self.hvp.is_some()
    }
}
