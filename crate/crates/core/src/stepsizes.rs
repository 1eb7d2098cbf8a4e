//! Stepsize parametrizations, the `(P, β)` product norm and box projections.
//!
//! Inner products and norms are taken in the parameter space of the active
//! parametrization: `α²` for a scalar, `Σ dᵢ²` for a diagonal and the
//! Frobenius norm for a full matrix.  A gradient restricted to a
//! parametrization pairs with a parameter displacement exactly as the full
//! gradient pairs with the embedded displacement.

use crate::{Matrix, OsgmError, Result, Vector};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parametrization {
    Scalar,
    Diagonal,
    Full,
}

impl fmt::Display for Parametrization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Parametrization::Scalar => "scalar",
            Parametrization::Diagonal => "diagonal",
            Parametrization::Full => "full",
        })
    }
}

impl FromStr for Parametrization {
    type Err = OsgmError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "scalar" => Ok(Parametrization::Scalar),
            "diagonal" | "diag" => Ok(Parametrization::Diagonal),
            "full" => Ok(Parametrization::Full),
            _ => Err(OsgmError::InvalidConfig(format!("unknown parametrization `{s}`"))),
        }
    }
}

/// A stepsize `P` acting on gradients.
#[derive(Clone, Debug, PartialEq)]
pub enum Stepsize {
    Scalar(f64),
    Diagonal(Vector),
    Full(Matrix),
}

impl Stepsize {
    pub fn kind(&self) -> Parametrization {
        match self {
            Stepsize::Scalar(_) => Parametrization::Scalar,
            Stepsize::Diagonal(_) => Parametrization::Diagonal,
            Stepsize::Full(_) => Parametrization::Full,
        }
    }

    /// `c·I` in the given parametrization.
    pub fn scaled_identity(kind: Parametrization, n: usize, c: f64) -> Stepsize {
        match kind {
            Parametrization::Scalar => Stepsize::Scalar(c),
            Parametrization::Diagonal => Stepsize::Diagonal(Vector::from_element(n, c)),
            Parametrization::Full => Stepsize::Full(Matrix::identity(n, n) * c),
        }
    }

    pub fn zeros_like(&self) -> Stepsize {
        self.map(|_| 0.0)
    }

    /// Dimension constraint, `None` for a scalar.
    pub fn dim(&self) -> Option<usize> {
        match self {
            Stepsize::Scalar(_) => None,
            Stepsize::Diagonal(d) => Some(d.len()),
            Stepsize::Full(m) => Some(m.nrows()),
        }
    }

    /// `P g`.
    pub fn apply(&self, g: &Vector) -> Result<Vector> {
        match self {
            Stepsize::Scalar(a) => Ok(g * *a),
            Stepsize::Diagonal(d) => {
                if d.len() != g.len() {
                    return Err(OsgmError::InvalidInput(format!("diagonal of length {} applied to vector of length {}", d.len(), g.len())));
                }
                Ok(d.component_mul(g))
            }
            Stepsize::Full(m) => {
                if m.ncols() != g.len() || m.nrows() != g.len() {
                    return Err(OsgmError::InvalidInput(format!("{}×{} matrix applied to vector of length {}", m.nrows(), m.ncols(), g.len())));
                }
                Ok(m * g)
            }
        }
    }

    /// The stepsize as an `n×n` matrix.
    pub fn to_full(&self, n: usize) -> Matrix {
        match self {
            Stepsize::Scalar(a) => Matrix::identity(n, n) * *a,
            Stepsize::Diagonal(d) => Matrix::from_diagonal(d),
            Stepsize::Full(m) => m.clone(),
        }
    }

    /// Same stepsize in a richer parametrization.
    pub fn embed(&self, kind: Parametrization, n: usize) -> Result<Stepsize> {
        match (self, kind) {
            (s, k) if s.kind() == k => Ok(s.clone()),
            (Stepsize::Scalar(a), Parametrization::Diagonal) => Ok(Stepsize::Diagonal(Vector::from_element(n, *a))),
            (s, Parametrization::Full) => Ok(Stepsize::Full(s.to_full(n))),
            (s, k) => Err(OsgmError::UnsupportedParametrization(format!("cannot embed {} into {}", s.kind(), k))),
        }
    }

    /// Squared parameter-space norm.
    pub fn norm_squared(&self) -> f64 {
        match self {
            Stepsize::Scalar(a) => a * a,
            Stepsize::Diagonal(d) => d.norm_squared(),
            Stepsize::Full(m) => m.norm_squared(),
        }
    }

    pub fn norm(&self) -> f64 {
        self.norm_squared().sqrt()
    }

    /// Parameter-space inner product; both operands must share a parametrization.
    pub fn dot(&self, other: &Stepsize) -> f64 {
        match (self, other) {
            (Stepsize::Scalar(a), Stepsize::Scalar(b)) => a * b,
            (Stepsize::Diagonal(a), Stepsize::Diagonal(b)) => a.dot(b),
            (Stepsize::Full(a), Stepsize::Full(b)) => a.dot(b),
            _ => panic!("stepsize dot: parametrization mismatch ({} vs {})", self.kind(), other.kind()),
        }
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Stepsize {
        match self {
            Stepsize::Scalar(a) => Stepsize::Scalar(f(*a)),
            Stepsize::Diagonal(d) => Stepsize::Diagonal(d.map(f)),
            Stepsize::Full(m) => Stepsize::Full(m.map(f)),
        }
    }

    /// Entrywise combination of two stepsizes of the same shape.
    pub fn zip_map(&self, other: &Stepsize, f: impl Fn(f64, f64) -> f64) -> Stepsize {
        match (self, other) {
            (Stepsize::Scalar(a), Stepsize::Scalar(b)) => Stepsize::Scalar(f(*a, *b)),
            (Stepsize::Diagonal(a), Stepsize::Diagonal(b)) => Stepsize::Diagonal(a.zip_map(b, f)),
            (Stepsize::Full(a), Stepsize::Full(b)) => Stepsize::Full(a.zip_map(b, f)),
            _ => panic!("stepsize zip: parametrization mismatch ({} vs {})", self.kind(), other.kind()),
        }
    }

    /// `self + c·other`.
    pub fn add_scaled(&self, c: f64, other: &Stepsize) -> Stepsize {
        self.zip_map(other, |a, b| a + c * b)
    }

    pub fn scale(&self, c: f64) -> Stepsize {
        self.map(|a| a * c)
    }

    /// Scalar summary for traces: `α`, the mean diagonal entry, or `tr(P)/n`.
    pub fn summary(&self) -> f64 {
        match self {
            Stepsize::Scalar(a) => *a,
            Stepsize::Diagonal(d) => d.mean(),
            Stepsize::Full(m) => m.trace() / m.nrows() as f64,
        }
    }

    pub fn is_finite(&self) -> bool {
        match self {
            Stepsize::Scalar(a) => a.is_finite(),
            Stepsize::Diagonal(d) => d.iter().all(|v| v.is_finite()),
            Stepsize::Full(m) => m.iter().all(|v| v.is_finite()),
        }
    }

    /// Restriction of the outer product `u vᵀ` to a parametrization:
    /// `⟨u, v⟩`, `u ∘ v`, or `u vᵀ`.
    pub fn restricted_outer(kind: Parametrization, u: &Vector, v: &Vector) -> Stepsize {
        match kind {
            Parametrization::Scalar => Stepsize::Scalar(u.dot(v)),
            Parametrization::Diagonal => Stepsize::Diagonal(u.component_mul(v)),
            Parametrization::Full => Stepsize::Full(u * v.transpose()),
        }
    }

    /// Restriction of a full matrix gradient `G` (the adjoint of the embedding).
    pub fn restrict(kind: Parametrization, g: &Matrix) -> Stepsize {
        match kind {
            Parametrization::Scalar => Stepsize::Scalar(g.trace()),
            Parametrization::Diagonal => Stepsize::Diagonal(g.diagonal()),
            Parametrization::Full => Stepsize::Full(g.clone()),
        }
    }
}

/// `‖(P, β)‖ = √(‖P‖² + β²/L²)`.
pub fn product_norm(p: &Stepsize, beta: f64, l: f64) -> f64 {
    (p.norm_squared() + beta * beta / (l * l)).sqrt()
}

/// `‖(P, β)‖* = √(‖P‖² + L²β²)`.
pub fn product_dual_norm(p: &Stepsize, beta: f64, l: f64) -> f64 {
    (p.norm_squared() + l * l * beta * beta).sqrt()
}

/// `⟨(P, β), (G, g)⟩ = ⟨P, G⟩ + βg`.
pub fn product_pairing(p: &Stepsize, beta: f64, g: &Stepsize, gb: f64) -> f64 {
    p.dot(g) + beta * gb
}

/// A closed interval, possibly unbounded on either side.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lower: f64,
    pub upper: f64,
}

impl Interval {
    pub const REAL_LINE: Interval = Interval { lower: f64::NEG_INFINITY, upper: f64::INFINITY };

    pub fn new(lower: f64, upper: f64) -> Result<Interval> {
        if lower.is_nan() || upper.is_nan() || lower > upper {
            return Err(OsgmError::InvalidParameter(format!("empty interval [{lower}, {upper}]")));
        }
        Ok(Interval { lower, upper })
    }

    pub fn clamp(&self, v: f64) -> f64 {
        v.max(self.lower).min(self.upper)
    }

    pub fn contains(&self, v: f64) -> bool {
        v >= self.lower && v <= self.upper
    }

    pub fn is_bounded(&self) -> bool {
        self.lower.is_finite() && self.upper.is_finite()
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }
}

/// Candidate sets `𝒫 × ℬ`: entrywise bounds on `P` and an interval for `β`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CandidateSet {
    pub p: Interval,
    pub beta: Interval,
}

impl Default for CandidateSet {
    fn default() -> Self {
        Self::unbounded()
    }
}

impl CandidateSet {
    pub fn unbounded() -> CandidateSet {
        CandidateSet { p: Interval::REAL_LINE, beta: Interval::REAL_LINE }
    }

    pub fn new(p: Interval, beta: Interval) -> CandidateSet {
        CandidateSet { p, beta }
    }

    /// Entries of `P` in `[−10/L, 10/L]`, `β ∈ [0, 1]`.
    pub fn default_box(l: f64) -> CandidateSet {
        CandidateSet { p: Interval { lower: -10.0 / l, upper: 10.0 / l }, beta: Interval { lower: 0.0, upper: 1.0 } }
    }

    pub fn project_p(&self, p: &Stepsize) -> Stepsize {
        if self.p == Interval::REAL_LINE {
            return p.clone();
        }
        p.map(|v| self.p.clamp(v))
    }

    pub fn project_beta(&self, beta: f64) -> f64 {
        self.beta.clamp(beta)
    }

    pub fn project(&self, p: &Stepsize, beta: f64) -> (Stepsize, f64) {
        (self.project_p(p), self.project_beta(beta))
    }

    pub fn contains_p(&self, p: &Stepsize) -> bool {
        match p {
            Stepsize::Scalar(a) => self.p.contains(*a),
            Stepsize::Diagonal(d) => d.iter().all(|&v| self.p.contains(v)),
            Stepsize::Full(m) => m.iter().all(|&v| self.p.contains(v)),
        }
    }

    /// Parameter-space diameter of `𝒫` for the given shape.
    pub fn diameter_p(&self, kind: Parametrization, n: usize) -> f64 {
        let entries = match kind {
            Parametrization::Scalar => 1.0,
            Parametrization::Diagonal => n as f64,
            Parametrization::Full => (n * n) as f64,
        };
        self.p.width() * entries.sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn v(xs: &[f64]) -> Vector {
        Vector::from_column_slice(xs)
    }

    #[test]
    fn apply_examples() {
        assert_eq!(Stepsize::Scalar(0.5).apply(&v(&[2.0, 4.0])).unwrap(), v(&[1.0, 2.0]));
        assert_eq!(Stepsize::Diagonal(v(&[1.0, 0.0])).apply(&v(&[3.0, 7.0])).unwrap(), v(&[3.0, 0.0]));
        let m = Matrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        assert_eq!(Stepsize::Full(m).apply(&v(&[1.0, 2.0])).unwrap(), v(&[2.0, 1.0]));
        assert!(matches!(Stepsize::Diagonal(v(&[1.0])).apply(&v(&[1.0, 2.0])), Err(OsgmError::InvalidInput(_))));
    }

    #[test]
    fn product_norm_examples() {
        let l = 3.0;
        let zero = Stepsize::Diagonal(Vector::zeros(2));
        assert!((product_norm(&zero, l, l) - 1.0).abs() < 1e-15);
        assert!((product_dual_norm(&zero, l, l) - l * l).abs() < 1e-15);
        let id = Stepsize::scaled_identity(Parametrization::Full, 2, 1.0);
        assert!((product_norm(&id, 0.0, l) - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn projection_examples() {
        let set = CandidateSet::new(Interval::new(0.0, 1.0).unwrap(), Interval::REAL_LINE);
        assert_eq!(set.project_p(&Stepsize::Scalar(2.0)), Stepsize::Scalar(1.0));
        assert_eq!(set.project_p(&Stepsize::Scalar(0.3)), Stepsize::Scalar(0.3));
        assert!(Interval::new(1.0, 0.0).is_err());
        let un = CandidateSet::unbounded();
        assert_eq!(un.project(&Stepsize::Scalar(-7.0), 42.0), (Stepsize::Scalar(-7.0), 42.0));
    }

    fn vec_strategy(n: usize) -> impl Strategy<Value = Vec<f64>> {
        proptest::collection::vec(-10.0..10.0f64, n)
    }

    proptest! {
        #[test]
        fn apply_is_linear(d in vec_strategy(4), g1 in vec_strategy(4), g2 in vec_strategy(4), a in -3.0..3.0f64) {
            let p = Stepsize::Diagonal(v(&d));
            let lhs = p.apply(&(v(&g1) * a + v(&g2))).unwrap();
            let rhs = p.apply(&v(&g1)).unwrap() * a + p.apply(&v(&g2)).unwrap();
            prop_assert!((lhs - rhs).amax() <= 1e-12);
        }

        #[test]
        fn scalar_embedding_applies_identically(a in -5.0..5.0f64, g in vec_strategy(5)) {
            let g = v(&g);
            let s = Stepsize::Scalar(a).apply(&g).unwrap();
            let d = Stepsize::Scalar(a).embed(Parametrization::Diagonal, 5).unwrap().apply(&g).unwrap();
            let f = Stepsize::Scalar(a).embed(Parametrization::Full, 5).unwrap().apply(&g).unwrap();
            prop_assert!((&s - &d).amax() <= 1e-14);
            prop_assert!((&s - &f).amax() <= 1e-14);
        }

        #[test]
        fn cauchy_pairing(p in vec_strategy(3), b in -5.0..5.0f64, g in vec_strategy(3), gb in -5.0..5.0f64, l in 0.1..10.0f64) {
            let p = Stepsize::Diagonal(v(&p));
            let g = Stepsize::Diagonal(v(&g));
            let lhs = product_pairing(&p, b, &g, gb).abs();
            prop_assert!(lhs <= product_norm(&p, b, l) * product_dual_norm(&g, gb, l) * (1.0 + 1e-12) + 1e-12);
        }

        #[test]
        fn projection_idempotent_nonexpansive(a in vec_strategy(4), b in vec_strategy(4), lo in -3.0..0.0f64, w in 0.0..5.0f64) {
            let set = CandidateSet::new(Interval::new(lo, lo + w).unwrap(), Interval::new(0.0, 1.0).unwrap());
            let pa = set.project_p(&Stepsize::Diagonal(v(&a)));
            let pb = set.project_p(&Stepsize::Diagonal(v(&b)));
            prop_assert!(set.contains_p(&pa));
            prop_assert_eq!(set.project_p(&pa), pa.clone());
            let d_in = Stepsize::Diagonal(v(&a)).add_scaled(-1.0, &Stepsize::Diagonal(v(&b))).norm();
            prop_assert!(pa.add_scaled(-1.0, &pb).norm() <= d_in + 1e-12);
        }

        #[test]
        fn restriction_is_consistent_with_embedding(u in vec_strategy(4), w in vec_strategy(4), dp in vec_strategy(16)) {
            let (u, w) = (v(&u), v(&w));
            let g_full = &u * w.transpose();
            for kind in [Parametrization::Scalar, Parametrization::Diagonal, Parametrization::Full] {
                let delta = match kind {
                    Parametrization::Scalar => Stepsize::Scalar(dp[0]),
                    Parametrization::Diagonal => Stepsize::Diagonal(v(&dp[..4])),
                    Parametrization::Full => Stepsize::Full(Matrix::from_column_slice(4, 4, &dp)),
                };
                let restricted = Stepsize::restricted_outer(kind, &u, &w);
                let via_full = Stepsize::restrict(kind, &g_full);
                prop_assert!(restricted.add_scaled(-1.0, &via_full).norm() <= 1e-12 * (1.0 + via_full.norm()));
                let lhs = restricted.dot(&delta);
                let rhs = g_full.dot(&delta.to_full(4));
                prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + rhs.abs()));
            }
        }
    }
}
