//! Potential of the fixed-momentum accelerated method on quadratics.

use crate::problems::QuadraticProblem;
use crate::Vector;

/// `φ_μ(x, z) = f(z) − f* + ‖∇f(x)‖²/(2μ)`.
pub fn agd_quadratic_potential(quad: &QuadraticProblem, x: &Vector, z: &Vector) -> f64 {
    let g = quad.gradient_at(x);
    (quad.value_at(z) - quad.fstar()).max(0.0) + g.norm_squared() / (2.0 * quad.strong_convexity())
}

/// Per-step contraction of [`agd_quadratic_potential`]:
/// `(κ−1)²/(κ(√κ+1)²)·(1 + 1/(2κ) + √(4κ+1)/(2κ))`.
pub fn agd_contraction_factor(kappa: f64) -> f64 {
    let sk = kappa.sqrt();
    let lead = (kappa - 1.0).powi(2) / (kappa * (sk + 1.0).powi(2));
    lead * (1.0 + 1.0 / (2.0 * kappa) + (4.0 * kappa + 1.0).sqrt() / (2.0 * kappa))
}

/// One step of the `(x, z)` recursion with `y = x + (z − x)/(√κ + 1)`,
/// `x⁺ = y − ∇f(y)/L` and `z⁺ = (1 − 1/√κ)z + (y − ∇f(y)/μ)/√κ`.
pub fn agd_step(quad: &QuadraticProblem, x: &Vector, z: &Vector) -> (Vector, Vector) {
    let l = quad.smoothness();
    let mu = quad.strong_convexity();
    let sk = (l / mu).sqrt();
    let y = x + (z - x) / (sk + 1.0);
    let g = quad.gradient_at(&y);
    let x_next = &y - &g / l;
    let z_next = z * (1.0 - 1.0 / sk) + (&y - &g / mu) / sk;
    (x_next, z_next)
}

/// Potential values along `steps` iterations from `x = z = x0`.
pub fn agd_potential_trace(quad: &QuadraticProblem, x0: &Vector, steps: usize) -> Vec<f64> {
    let mut x = x0.clone();
    let mut z = x0.clone();
    let mut out = Vec::with_capacity(steps + 1);
    out.push(agd_quadratic_potential(quad, &x, &z));
    for _ in 0..steps {
        (x, z) = agd_step(quad, &x, &z);
        out.push(agd_quadratic_potential(quad, &x, &z));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factor_at_four() {
        let f = agd_contraction_factor(4.0);
        let hand = 9.0 / 36.0 * (1.0 + 1.0 / 8.0 + 17f64.sqrt() / 8.0);
        assert!((f - hand).abs() < 1e-15);
        assert!((f - 0.41008).abs() < 1e-4);
        assert!(f <= 0.5);
    }

    #[test]
    fn factor_below_plain_rate() {
        for kappa in [1.5, 2.0, 4.0, 25.0, 100.0, 1e4, 1e8] {
            assert!(agd_contraction_factor(kappa) <= 1.0 - 1.0 / kappa.sqrt(), "κ = {kappa}");
        }
    }

    #[test]
    fn potential_vanishes_at_minimizer() {
        let q = QuadraticProblem::diagonal(&[1.0, 3.0, 9.0]).unwrap();
        let xs = q.minimizer().clone();
        assert!(agd_quadratic_potential(&q, &xs, &xs).abs() < 1e-15);
    }

    #[test]
    fn ratio_within_factor() {
        let q = QuadraticProblem::diagonal(&[1.0, 2.0, 7.0, 25.0]).unwrap();
        let x0 = Vector::from_vec(vec![1.0, -2.0, 0.5, 0.3]);
        let tr = agd_potential_trace(&q, &x0, 200);
        let c = agd_contraction_factor(25.0);
        for w in tr.windows(2) {
            if w[0] > 1e-280 {
                assert!(w[1] / w[0] <= c + 1e-10);
            }
        }
    }
}
