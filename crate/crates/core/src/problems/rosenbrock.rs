use super::objective::{Metadata, Objective, SmoothFunction};
use crate::{OsgmError, Result, Vector};
use std::sync::Arc;

/// Sum of independent 2D Rosenbrock blocks over consecutive coordinate pairs:
/// `Σᵢ 100(x₂ᵢ − x₂ᵢ₋₁²)² + (1 − x₂ᵢ₋₁)²`.
#[derive(Clone, Debug)]
pub struct Rosenbrock {
    n: usize,
}

impl SmoothFunction for Rosenbrock {
    fn dim(&self) -> usize {
        self.n
    }
    fn value(&self, x: &Vector) -> f64 {
        (0..self.n / 2)
            .map(|i| {
                let (u, v) = (x[2 * i], x[2 * i + 1]);
                100.0 * (v - u * u).powi(2) + (1.0 - u).powi(2)
            })
            .sum()
    }
    fn gradient(&self, x: &Vector) -> Vector {
        let mut g = Vector::zeros(self.n);
        for i in 0..self.n / 2 {
            let (u, v) = (x[2 * i], x[2 * i + 1]);
            let r = v - u * u;
            g[2 * i] = -400.0 * u * r - 2.0 * (1.0 - u);
            g[2 * i + 1] = 200.0 * r;
        }
        g
    }
    fn hvp(&self, x: &Vector, d: &Vector) -> Option<Vector> {
        let mut out = Vector::zeros(self.n);
        for i in 0..self.n / 2 {
            let (u, v) = (x[2 * i], x[2 * i + 1]);
            let h11 = 1200.0 * u * u - 400.0 * v + 2.0;
            let h12 = -400.0 * u;
            out[2 * i] = h11 * d[2 * i] + h12 * d[2 * i + 1];
            out[2 * i + 1] = h12 * d[2 * i] + 200.0 * d[2 * i + 1];
        }
        Some(out)
    }
    fn has_hvp(&self) -> bool {
        true
    }
}

/// Radius of the box `‖x‖∞ ≤ r` on which the default constants are valid.
pub const ROSENBROCK_DEFAULT_RADIUS: f64 = 2.0;

/// Rosenbrock with smoothness and Hessian-Lipschitz constants valid on the
/// box `‖x‖∞ ≤ ROSENBROCK_DEFAULT_RADIUS`.
pub fn make_rosenbrock(n: usize) -> Result<Objective> {
    make_rosenbrock_on_box(n, ROSENBROCK_DEFAULT_RADIUS)
}

/// Rosenbrock whose `L` and `H` bound the Hessian and its variation on the box
/// `‖x‖∞ ≤ r` (Gershgorin bound for `L`).
pub fn make_rosenbrock_on_box(n: usize, r: f64) -> Result<Objective> {
    if n < 2 || !n.is_multiple_of(2) {
        return Err(OsgmError::InvalidParameter(format!("n must be even and ≥ 2, got {n}")));
    }
    if !(r > 0.0) {
        return Err(OsgmError::InvalidParameter("box radius must be positive".into()));
    }
    let l = (1200.0 * r * r + 800.0 * r + 2.0).max(400.0 * r + 200.0);
    let meta = Metadata {
        smoothness: l,
        strong_convexity: None,
        fstar: Some(0.0),
        hessian_lipschitz: Some(2400.0 * r + 800.0),
        convex: false,
        quadratic: false,
        minimizer: Some(Vector::from_element(n, 1.0)),
    };
    Ok(Objective::new(format!("rosenbrock-n{n}"), Arc::new(Rosenbrock { n }), meta))
}

/// The classical starting point `(−1.2, 1, −1.2, 1, …)`.
pub fn rosenbrock_start(n: usize) -> Vector {
    Vector::from_fn(n, |i, _| if i % 2 == 0 { -1.2 } else { 1.0 })
}
