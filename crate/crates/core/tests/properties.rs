use osgm::feedback::{hb_feedback, hypergrad_feedback};
use osgm::harness::{parse_libsvm, serialize_libsvm, SparseDataset};
use osgm::optimizers::{run, Algorithm, RunConfig};
use osgm::problems::{soft_threshold, L1Term, ProxTerm};
use osgm::{EvalPoint, HBParams, HBPoint, HBState, Parametrization, QuadraticProblem, Stepsize, Vector};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn quad(seed: u64, n: usize, kappa: f64) -> QuadraticProblem {
    QuadraticProblem::random(n, kappa, true, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap()
}

fn vec_of(n: usize) -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(-3.0..3.0f64, n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn hypergradient_feedback_is_midpoint_convex(seed in 0u64..1000, kappa in 1.0..1e3f64, x in vec_of(4), a in vec_of(4), b in vec_of(4)) {
        let obj = quad(seed, 4, kappa).objective();
        let at = EvalPoint::new(&obj, Vector::from_vec(x));
        prop_assume!(at.grad_norm_sq() > 1e-12);
        let pa = Stepsize::Diagonal(Vector::from_vec(a));
        let pb = Stepsize::Diagonal(Vector::from_vec(b));
        let mid = pa.add_scaled(1.0, &pb).scale(0.5);
        let h = |p: &Stepsize| hypergrad_feedback(&obj, &at, p).unwrap().feedback.value;
        let (ha, hb, hm) = (h(&pa), h(&pb), h(&mid));
        prop_assert!(hm <= 0.5 * (ha + hb) + 1e-9 * (1.0 + ha.abs() + hb.abs()));
    }

    #[test]
    fn heavy_ball_feedback_is_jointly_midpoint_convex(
        seed in 0u64..1000, z1 in vec_of(3), z2 in vec_of(3), a in vec_of(3), b in vec_of(3), ba in -2.0..2.0f64, bb in -2.0..2.0f64,
    ) {
        let obj = quad(seed, 3, 50.0).objective();
        let params = HBParams::defaults(obj.smoothness());
        let z = HBPoint::new(&obj, &HBState { z1: Vector::from_vec(z1), z2: Vector::from_vec(z2) });
        let pa = Stepsize::Diagonal(Vector::from_vec(a));
        let pb = Stepsize::Diagonal(Vector::from_vec(b));
        let mid = pa.add_scaled(1.0, &pb).scale(0.5);
        let h = |p: &Stepsize, beta: f64| hb_feedback(&obj, &z, p, beta, &params).unwrap().feedback.value;
        let (ha, hb, hm) = (h(&pa, ba), h(&pb, bb), h(&mid, 0.5 * (ba + bb)));
        prop_assert!(hm <= 0.5 * (ha + hb) + 1e-9 * (1.0 + ha.abs() + hb.abs()));
    }

    #[test]
    fn heavy_ball_feedback_at_zero_step_is_nonpositive(seed in 0u64..1000, z1 in vec_of(3), z2 in vec_of(3)) {
        // P = 0, β = 0 keeps z₁ and drops the momentum term of the potential
        let obj = quad(seed, 3, 20.0).objective();
        let params = HBParams::defaults(obj.smoothness());
        let z = HBPoint::new(&obj, &HBState { z1: Vector::from_vec(z1), z2: Vector::from_vec(z2) });
        let h = hb_feedback(&obj, &z, &Stepsize::Scalar(0.0), 0.0, &params).unwrap().feedback.value;
        prop_assert!(h <= 1e-15);
    }

    #[test]
    fn l1_prox_is_nonexpansive(x in vec_of(5), y in vec_of(5), w in 0.0..2.0f64, t in 1e-3..10.0f64) {
        let term = L1Term { weight: w };
        let (x, y) = (Vector::from_vec(x), Vector::from_vec(y));
        let d = (term.prox(&x, t) - term.prox(&y, t)).norm();
        prop_assert!(d <= (x - y).norm() * (1.0 + 1e-12));
    }

    #[test]
    fn soft_threshold_shrinks(v in -10.0..10.0f64, t in 0.0..5.0f64) {
        let s = soft_threshold(v, t);
        prop_assert!(s.abs() <= v.abs());
        prop_assert!(s == 0.0 || s.signum() == v.signum());
        prop_assert!((v - s).abs() <= t + 1e-15);
    }

    #[test]
    fn libsvm_round_trip(rows in proptest::collection::vec(proptest::collection::btree_map(1usize..50, -1e6..1e6f64, 0..8), 1..20), extra in 0usize..3) {
        let labels = (0..rows.len()).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
        let rows: Vec<Vec<(usize, f64)>> = rows.into_iter().map(|r| r.into_iter().collect()).collect();
        let n_features = rows.iter().flat_map(|r| r.iter().map(|p| p.0)).max().unwrap_or(0) + extra;
        let ds = SparseDataset { rows, labels, n_features };
        let text = serialize_libsvm(&ds);
        let back = parse_libsvm(&text).unwrap();
        prop_assert_eq!(&back, &ds);
        prop_assert_eq!(serialize_libsvm(&back), text);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn monotone_methods_never_increase_their_merit(seed in 0u64..1000, kappa in 2.0..500.0f64, which in 0usize..5) {
        let alg = [Algorithm::OsgmHMonotone, Algorithm::OsgmHLookahead, Algorithm::OsgmBest, Algorithm::OsgmHbAdagrad, Algorithm::OsgmBb][which];
        let obj = quad(seed, 6, kappa).objective();
        let kind = if alg == Algorithm::OsgmBb { Parametrization::Scalar } else { Parametrization::Diagonal };
        let t = run(&obj, &RunConfig::new(alg).with_parametrization(kind).with_seed(seed).with_budget(300)).unwrap();
        let merit: Vec<f64> = if alg.uses_heavy_ball_potential() {
            t.records.iter().map(|r| r.potential).filter(|p| p.is_finite()).collect()
        } else {
            t.f_column()
        };
        prop_assert!(merit.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn budget_is_never_exceeded(seed in 0u64..1000, budget in 1u64..60, which in 0usize..15) {
        let alg = Algorithm::ALL[which];
        let obj = quad(seed, 5, 30.0).objective();
        let kind = if alg == Algorithm::OsgmBb { Parametrization::Scalar } else { Parametrization::Diagonal };
        let cfg = RunConfig::new(alg).with_parametrization(kind).with_seed(seed).with_budget(budget);
        if let Ok(t) = run(&obj, &cfg) {
            prop_assert!(t.oracles() <= budget);
        }
    }
}
