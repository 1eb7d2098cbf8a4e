use super::objective::Objective;
use crate::linalg::norm_inf;
use crate::{Matrix, Vector};

/// Minimizes `obj` to `‖∇f‖∞ ≤ tol` and returns `(x, f(x))`.
///
/// Damped Newton on the dense Hessian assembled from `n` Hessian-vector
/// products, with Armijo backtracking and a gradient step fallback when the
/// Newton direction is not a descent direction.  Objectives without an hvp use
/// plain gradient descent with stepsize `1/L`.  Oracles are charged to a
/// private counter so the caller's tally is untouched.
pub fn solve_reference(obj: &Objective, x0: &Vector, tol: f64, max_iter: usize) -> (Vector, f64) {
    let f = obj.with_fresh_counters();
    let n = f.dim();
    let l = f.smoothness();
    let mut x = x0.clone();
    let (mut fx, mut g) = f.eval(&x);
    for _ in 0..max_iter {
        if norm_inf(&g) <= tol {
            break;
        }
        let dir = if f.has_hvp() {
            let mut h = Matrix::zeros(n, n);
            for j in 0..n {
                let e = Vector::from_fn(n, |i, _| if i == j { 1.0 } else { 0.0 });
                let col = f.hvp(&x, &e).expect("hvp advertised");
                h.set_column(j, &col);
            }
            let h = (&h + h.transpose()) * 0.5;
            let mut shift = 0.0;
            let mut d = None;
            for _ in 0..30 {
                let hs = &h + Matrix::identity(n, n) * shift;
                if let Some(ch) = hs.cholesky() {
                    d = Some(-ch.solve(&g));
                    break;
                }
                shift = if shift == 0.0 { 1e-10 * l } else { shift * 10.0 };
            }
            match d {
                Some(d) if d.dot(&g) < 0.0 => d,
                _ => -&g / l,
            }
        } else {
            -&g / l
        };
        let slope = dir.dot(&g);
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..60 {
            let xt = &x + &dir * t;
            let ft = f.value(&xt);
            if ft <= fx + 1e-4 * t * slope {
                x = xt;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if !accepted {
            // no measurable decrease left at double precision
            break;
        }
        let e = f.eval(&x);
        fx = e.0;
        g = e.1;
    }
    (x, fx)
}
