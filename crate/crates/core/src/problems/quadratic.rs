use super::objective::{Metadata, Objective, SmoothFunction};
use crate::linalg::random_orthogonal;
use crate::{Matrix, Vector};
use crate::{OsgmError, Result};
use rand::Rng;
use std::sync::Arc;

/// `f(x) = ½⟨x, Ax⟩ − ⟨b, x⟩` with `A = Q diag(Λ) Qᵀ` positive definite.
#[derive(Clone, Debug)]
pub struct QuadraticProblem {
    eigenvalues: Vector,
    basis: Option<Matrix>,
    offset: Option<Vector>,
    a: Matrix,
    minimizer: Vector,
    fstar: f64,
}

impl QuadraticProblem {
    pub fn new(eigenvalues: Vector, basis: Option<Matrix>, offset: Option<Vector>) -> Result<Self> {
        let n = eigenvalues.len();
        if n == 0 {
            return Err(OsgmError::InvalidInput("quadratic needs at least one eigenvalue".into()));
        }
        if eigenvalues.iter().any(|&l| !(l > 0.0) || !l.is_finite()) {
            return Err(OsgmError::InvalidParameter("eigenvalues must be positive and finite".into()));
        }
        if let Some(q) = &basis {
            if q.nrows() != n || q.ncols() != n {
                return Err(OsgmError::InvalidInput("basis must be n×n".into()));
            }
            let err = (q.transpose() * q - Matrix::identity(n, n)).amax();
            if err > 1e-8 {
                return Err(OsgmError::InvalidParameter(format!("basis is not orthogonal (error {err:e})")));
            }
        }
        if let Some(b) = &offset {
            if b.len() != n {
                return Err(OsgmError::InvalidInput("offset length must equal dimension".into()));
            }
        }
        let a = match &basis {
            Some(q) => {
                let a = q * Matrix::from_diagonal(&eigenvalues) * q.transpose();
                // symmetrize away rounding
                (&a + a.transpose()) * 0.5
            }
            None => Matrix::from_diagonal(&eigenvalues),
        };
        let (minimizer, fstar) = match &offset {
            None => (Vector::zeros(n), 0.0),
            Some(b) => {
                let qtb = match &basis {
                    Some(q) => q.transpose() * b,
                    None => b.clone(),
                };
                let y = qtb.component_div(&eigenvalues);
                let xs = match &basis {
                    Some(q) => q * &y,
                    None => y,
                };
                let fs = -0.5 * b.dot(&xs);
                (xs, fs)
            }
        };
        Ok(QuadraticProblem { eigenvalues, basis, offset, a, minimizer, fstar })
    }

    /// Diagonal quadratic with the given eigenvalues.
    pub fn diagonal(eigenvalues: &[f64]) -> Result<Self> {
        Self::new(Vector::from_column_slice(eigenvalues), None, None)
    }

    /// Random rotated quadratic with `L = kappa`, `μ = 1` and the remaining
    /// eigenvalues log-uniform in between.
    pub fn random<R: Rng + ?Sized>(n: usize, kappa: f64, rotate: bool, rng: &mut R) -> Result<Self> {
        if n < 2 {
            return Err(OsgmError::InvalidParameter("random quadratic needs n ≥ 2".into()));
        }
        if !(kappa >= 1.0) {
            return Err(OsgmError::InvalidParameter("kappa must be ≥ 1".into()));
        }
        let mut eig = vec![kappa, 1.0];
        for _ in 2..n {
            let t: f64 = rng.random();
            eig.push(kappa.powf(t));
        }
        let basis = if rotate { Some(random_orthogonal(n, rng)) } else { None };
        Self::new(Vector::from_vec(eig), basis, None)
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }
    pub fn eigenvalues(&self) -> &Vector {
        &self.eigenvalues
    }
    pub fn basis(&self) -> Option<&Matrix> {
        self.basis.as_ref()
    }
    pub fn offset(&self) -> Option<&Vector> {
        self.offset.as_ref()
    }
    pub fn matrix(&self) -> &Matrix {
        &self.a
    }
    pub fn minimizer(&self) -> &Vector {
        &self.minimizer
    }
    pub fn fstar(&self) -> f64 {
        self.fstar
    }
    pub fn smoothness(&self) -> f64 {
        self.eigenvalues.max()
    }
    pub fn strong_convexity(&self) -> f64 {
        self.eigenvalues.min()
    }
    pub fn condition_number(&self) -> f64 {
        self.smoothness() / self.strong_convexity()
    }

    pub fn value_at(&self, x: &Vector) -> f64 {
        let ax = &self.a * x;
        let lin = self.offset.as_ref().map_or(0.0, |b| b.dot(x));
        0.5 * x.dot(&ax) - lin
    }

    pub fn gradient_at(&self, x: &Vector) -> Vector {
        let mut g = &self.a * x;
        if let Some(b) = &self.offset {
            g -= b;
        }
        g
    }

    pub fn objective(&self) -> Objective {
        let meta = Metadata {
            smoothness: self.smoothness(),
            strong_convexity: Some(self.strong_convexity()),
            fstar: Some(self.fstar),
            hessian_lipschitz: Some(0.0),
            convex: true,
            quadratic: true,
            minimizer: Some(self.minimizer.clone()),
        };
        Objective::new(format!("quadratic-n{}-k{:.6e}", self.dim(), self.condition_number()), Arc::new(self.clone()), meta)
    }
}

impl SmoothFunction for QuadraticProblem {
    fn dim(&self) -> usize {
        self.eigenvalues.len()
    }
    fn value(&self, x: &Vector) -> f64 {
        self.value_at(x)
    }
    fn gradient(&self, x: &Vector) -> Vector {
        self.gradient_at(x)
    }
    fn hvp(&self, _x: &Vector, v: &Vector) -> Option<Vector> {
        Some(&self.a * v)
    }
    fn has_hvp(&self) -> bool {
        true
    }
}

/// `f(x) = ½x₁² + (κ/2)x₂²`.
pub fn make_quadratic_2d(kappa: f64) -> Result<Objective> {
    if !(kappa >= 2.0) || !kappa.is_finite() {
        return Err(OsgmError::InvalidParameter(format!("kappa must be ≥ 2, got {kappa}")));
    }
    Ok(QuadraticProblem::diagonal(&[1.0, kappa])?.objective().with_name(format!("quadratic-2d-k{kappa}")))
}
