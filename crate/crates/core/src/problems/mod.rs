//! Objectives with oracle counters and the built-in problem suite.

mod composite;
mod glm;
mod objective;
mod quadratic;
mod reference;
mod rosenbrock;

pub use composite::{make_lasso, soft_threshold, CompositeObjective, L1Term, ProxTerm, ZeroTerm};
pub use glm::{make_logistic, make_smooth_svm, LabeledDesign, Logistic, SquaredHingeSvm};
pub use objective::{Metadata, Objective, OracleCounts, SmoothFunction};
pub use quadratic::{make_quadratic_2d, QuadraticProblem};
pub use reference::solve_reference;
pub use rosenbrock::{make_rosenbrock, make_rosenbrock_on_box, rosenbrock_start, Rosenbrock, ROSENBROCK_DEFAULT_RADIUS};

/// Attaches a reference optimal value to a convex objective by solving it to
/// `‖∇f‖∞ ≤ 1e-9` from the origin.  Objectives that already know `f*` are
/// returned unchanged.
pub fn with_reference_fstar(obj: Objective) -> Objective {
    if obj.fstar().is_some() {
        return obj;
    }
    let x0 = crate::Vector::zeros(obj.dim());
    let (_, fs) = solve_reference(&obj, &x0, 1e-9, 500);
    obj.with_fstar(fs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::CsrMatrix;
    use crate::{Matrix, Vector};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    fn fd_gradient(obj: &Objective, x: &Vector) -> Vector {
        let h = 1e-6 * x.norm().max(1.0);
        Vector::from_fn(x.len(), |i, _| {
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[i] += h;
            xm[i] -= h;
            (obj.value(&xp) - obj.value(&xm)) / (2.0 * h)
        })
    }

    fn rel_err(a: &Vector, b: &Vector) -> f64 {
        (a - b).norm() / a.norm().max(b.norm()).max(1e-12)
    }

    fn random_design(m: usize, n: usize, rng: &mut ChaCha8Rng) -> LabeledDesign {
        let mut rows: Vec<Vec<(usize, f64)>> = Vec::with_capacity(m);
        for _ in 0..m {
            let mut row = Vec::new();
            for j in 0..n {
                if rng.random::<f64>() < 0.7 {
                    row.push((j, rng.sample::<f64, _>(StandardNormal)));
                }
            }
            rows.push(row);
        }
        let labels = (0..m).map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 }).collect();
        LabeledDesign::new(CsrMatrix::from_rows(&rows, n), labels).unwrap()
    }

    #[test]
    fn quadratic_2d_values() {
        let q = make_quadratic_2d(10.0).unwrap();
        let x = Vector::from_vec(vec![1.0, 1.0]);
        assert_eq!(q.value(&x), 5.5);
        assert_eq!(q.gradient(&x), Vector::from_vec(vec![1.0, 10.0]));
        assert_eq!(q.smoothness(), 10.0);
        assert_eq!(q.strong_convexity(), Some(1.0));
        assert_eq!(2.0 / (q.smoothness() + 1.0), 2.0 / 11.0);
        assert_eq!(q.value(&Vector::zeros(2)), 0.0);
        assert_eq!(q.fstar(), Some(0.0));
    }

    #[test]
    fn quadratic_2d_rejects_small_kappa() {
        assert!(matches!(make_quadratic_2d(1.5), Err(crate::OsgmError::InvalidParameter(_))));
    }

    #[test]
    fn quadratic_with_offset_has_exact_minimizer() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let base = QuadraticProblem::random(6, 50.0, true, &mut rng).unwrap();
        let b = Vector::from_fn(6, |_, _| rng.sample::<f64, _>(StandardNormal));
        let q = QuadraticProblem::new(base.eigenvalues().clone(), base.basis().cloned(), Some(b.clone())).unwrap();
        // independent: solve A x = b with a dense LU
        let xs = q.matrix().clone().lu().solve(&b).unwrap();
        assert!((q.minimizer() - &xs).norm() < 1e-10);
        assert!((q.fstar() - (0.5 * xs.dot(&(q.matrix() * &xs)) - b.dot(&xs))).abs() < 1e-12);
        assert!(q.gradient_at(q.minimizer()).norm() < 1e-10);
        assert!((q.condition_number() - 50.0).abs() < 1e-12);
    }

    #[test]
    fn logistic_single_sample_at_zero() {
        let a = CsrMatrix::from_rows(&[vec![(0, 1.0)]], 2);
        let obj = make_logistic(LabeledDesign::new(a, vec![1.0]).unwrap(), 0.0).unwrap();
        let x = Vector::zeros(2);
        assert!((obj.value(&x) - std::f64::consts::LN_2).abs() < 1e-15);
        let g = obj.gradient(&x);
        assert!((g[0] + 0.5).abs() < 1e-15 && g[1] == 0.0);
    }

    #[test]
    fn logistic_reports_regularizer_curvature() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let obj = make_logistic(random_design(20, 5, &mut rng), 1.0).unwrap();
        assert_eq!(obj.strong_convexity(), Some(1.0));
    }

    #[test]
    fn empty_dataset_rejected() {
        let a = CsrMatrix::from_rows(&[], 3);
        assert!(matches!(LabeledDesign::new(a, vec![]), Err(crate::OsgmError::InvalidInput(_))));
    }

    #[test]
    fn glm_gradients_match_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let d = random_design(20, 5, &mut rng);
        for obj in [make_logistic(d.clone(), 0.1).unwrap(), make_smooth_svm(d, 0.1).unwrap()] {
            for _ in 0..20 {
                let x = Vector::from_fn(5, |_, _| rng.sample::<f64, _>(StandardNormal));
                let e = rel_err(&obj.gradient(&x), &fd_gradient(&obj, &x));
                assert!(e <= 1e-6, "{}: {e}", obj.name());
            }
        }
    }

    #[test]
    fn svm_inactive_sample_contributes_nothing() {
        let a = CsrMatrix::from_rows(&[vec![(0, 2.0)]], 1);
        let obj = make_smooth_svm(LabeledDesign::new(a, vec![1.0]).unwrap(), 0.0).unwrap();
        let x = Vector::from_vec(vec![1.0]); // margin 2 ≥ 1
        assert_eq!(obj.value(&x), 0.0);
        assert_eq!(obj.gradient(&x)[0], 0.0);
        let a = CsrMatrix::from_rows(&[vec![(0, 2.0)]], 1);
        let obj = make_smooth_svm(LabeledDesign::new(a, vec![1.0]).unwrap(), 0.25).unwrap();
        assert_eq!(obj.strong_convexity(), Some(0.25));
    }

    #[test]
    fn glm_hvp_matches_gradient_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let d = random_design(30, 6, &mut rng);
        let obj = make_logistic(d, 0.05).unwrap();
        for _ in 0..10 {
            let x = Vector::from_fn(6, |_, _| rng.sample::<f64, _>(StandardNormal));
            let v = Vector::from_fn(6, |_, _| rng.sample::<f64, _>(StandardNormal));
            let h = 1e-6;
            let fd = (obj.gradient(&(&x + &v * h)) - obj.gradient(&(&x - &v * h))) / (2.0 * h);
            assert!(rel_err(&obj.hvp(&x, &v).unwrap(), &fd) < 1e-6);
        }
    }

    #[test]
    fn rosenbrock_known_values_and_hvp() {
        let r = make_rosenbrock(2).unwrap();
        assert_eq!(r.value(&Vector::zeros(2)), 1.0);
        let r10 = make_rosenbrock(10).unwrap();
        let ones = Vector::from_element(10, 1.0);
        assert_eq!(r10.value(&ones), 0.0);
        assert_eq!(r10.gradient(&ones), Vector::zeros(10));
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let x = Vector::from_fn(10, |_, _| rng.sample::<f64, _>(StandardNormal));
            let v = Vector::from_fn(10, |_, _| rng.sample::<f64, _>(StandardNormal));
            let h = 1e-6 * x.norm().max(1.0);
            let fd = (r10.gradient(&(&x + &v * h)) - r10.gradient(&(&x - &v * h))) / (2.0 * h);
            assert!(rel_err(&r10.hvp(&x, &v).unwrap(), &fd) <= 1e-5);
            assert!(rel_err(&r10.gradient(&x), &fd_gradient(&r10, &x)) <= 1e-6);
        }
        assert!(make_rosenbrock(3).is_err());
    }

    #[test]
    fn rosenbrock_constants_dominate_hessian_on_box() {
        let r = make_rosenbrock(2).unwrap();
        let rad = ROSENBROCK_DEFAULT_RADIUS;
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..2000 {
            let x = Vector::from_fn(2, |_, _| rng.random_range(-rad..rad));
            let h =
                Matrix::from_columns(&[r.hvp(&x, &Vector::from_vec(vec![1.0, 0.0])).unwrap(), r.hvp(&x, &Vector::from_vec(vec![0.0, 1.0])).unwrap()]);
            let ev = h.symmetric_eigen().eigenvalues;
            assert!(ev.amax() <= r.smoothness());
        }
    }

    #[test]
    fn lasso_soft_threshold_and_zero_weight() {
        assert_eq!(soft_threshold(2.0, 1.0), 1.0);
        assert_eq!(soft_threshold(0.5, 1.0), 0.0);
        assert_eq!(soft_threshold(-3.0, 1.0), -2.0);
        let a = Matrix::from_row_slice(3, 2, &[1.0, 2.0, 0.5, -1.0, 2.0, 0.0]);
        let b = Vector::from_vec(vec![1.0, -1.0, 0.5]);
        let comp = make_lasso(&a, &b, 0.0).unwrap();
        let x = Vector::from_vec(vec![0.3, -0.7]);
        assert_eq!(comp.prox(&x, 0.7), x);
        let g = comp.smooth.gradient(&x);
        let gm = comp.gradient_map_from(&x, &g, comp.smoothness());
        assert!((gm - g).amax() < 1e-14);
        let comp1 = make_lasso(&a, &b, 1.0).unwrap();
        assert_eq!(comp1.prox(&Vector::from_vec(vec![2.0, 0.5]), 1.0), Vector::from_vec(vec![1.0, 0.0]));
    }

    #[test]
    fn counters_track_every_call() {
        let q = make_quadratic_2d(4.0).unwrap();
        let x = Vector::from_vec(vec![1.0, 2.0]);
        q.value(&x);
        q.gradient(&x);
        q.eval(&x);
        q.hvp(&x, &x);
        let c = q.counts();
        assert_eq!((c.values, c.gradients, c.hvps), (2, 2, 1));
        let fresh = q.with_fresh_counters();
        assert_eq!(fresh.counts(), OracleCounts::default());
        let shared = q.clone();
        shared.value(&x);
        assert_eq!(q.counts().values, 3);
    }

    #[test]
    fn reference_solver_reaches_tolerance() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let d = random_design(40, 5, &mut rng);
        for obj in [make_logistic(d.clone(), 0.01).unwrap(), make_smooth_svm(d, 0.01).unwrap()] {
            let (x, fx) = solve_reference(&obj, &Vector::zeros(5), 1e-9, 200);
            assert!(crate::linalg::norm_inf(&obj.gradient(&x)) <= 1e-9, "{}", obj.name());
            assert_eq!(obj.value(&x), fx);
        }
    }
}
