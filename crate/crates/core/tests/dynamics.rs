use osgm::dynamics::*;
use osgm::optimizers::{run, Algorithm, RunConfig};
use osgm::{Parametrization, Stepsize, Vector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::time::Instant;

#[test]
fn orbit_is_period_two_for_random_pairs() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut pairs = vec![(4.0, 1.0)];
    for _ in 0..10 {
        let mu: f64 = rng.random_range(0.1..5.0);
        pairs.push((mu * rng.random_range(1.5..200.0), mu));
    }
    for (l, mu) in pairs {
        for n in [2, 3, 5] {
            let lam = orbit_spectrum(l, mu, n).unwrap();
            let (s1, s2) = orbit(l, mu, n, 1.0).unwrap();
            let eta = 1.0 / l;
            let h1 = step_hdm(&s1, &lam, eta).unwrap();
            let o1 = step_osgm(&s1, &lam, eta).unwrap();
            assert!(h1.distance(&o1) < 1e-12);
            assert!(h1.distance(&s2) < 1e-12);
            assert!((h1.alpha - s1.alpha).abs() < 1e-14);
            for kind in [MapKind::Hdm, MapKind::Osgm] {
                let back = step(kind, &step(kind, &s1, &lam, eta).unwrap(), &lam, eta).unwrap();
                assert!(back.distance(&s1) < 1e-12, "L = {l}, μ = {mu}");
            }
        }
    }
}

#[test]
fn product_radii() {
    let start = Instant::now();
    for kappa in [2.0, 4.0, 10.0, 100.0] {
        let o = orbit_spectral_radius(MapKind::Osgm, kappa, 1.0, 2).unwrap();
        assert!((o - osgm_orbit_radius(kappa)).abs() < 1e-6, "κ = {kappa}: {o}");
        let h = orbit_spectral_radius(MapKind::Hdm, kappa, 1.0, 2).unwrap();
        assert!(h < 1.0 - 1e-6);
        // observed closed form of the HDM radius (independent numpy check)
        assert!((h - (kappa - 1.0) / (2.0 * kappa)).abs() < 1e-6);
    }
    assert!(start.elapsed().as_secs_f64() < 1.0);
}

#[test]
fn maps_match_the_optimizers_in_scale_free_coordinates() {
    let kappa = 10.0;
    let obj = osgm::problems::make_quadratic_2d(kappa).unwrap();
    let lam = Vector::from_vec(vec![1.0, kappa]);
    // α₁ = 0 or 1/L would make some step exactly annihilate one eigencomponent
    let a1 = 0.5 / kappa;
    let s0 = DynState::new(a1, Vector::from_vec(vec![1.0, 1.0])).unwrap();
    for (kind, alg) in [(MapKind::Hdm, Algorithm::ClassicHdm), (MapKind::Osgm, Algorithm::OsgmH)] {
        let cfg = RunConfig::new(alg)
            .with_parametrization(Parametrization::Scalar)
            .with_p0(Stepsize::Scalar(a1))
            .with_eta(1.0 / kappa)
            .with_x0(Vector::from_vec(vec![1.0, 1.0]))
            .with_tol(1e-300)
            .with_budget(5000);
        let t = run(&obj, &cfg).unwrap();
        let path = stepsize_path(kind, &s0, &lam, 1.0 / kappa, 1000).unwrap();
        // the unscaled OSGM-H iterates overflow eventually; compare while finite
        let mut compared = 0;
        for (k, a) in path.iter().enumerate() {
            let Some(rec) = t.records.get(k + 1).filter(|r| r.step_summary.is_finite() && r.f.is_finite()) else { break };
            assert!((rec.step_summary - a).abs() <= 1e-8 * a.abs().max(1.0), "{kind:?} k = {k}: {} vs {a}", rec.step_summary);
            compared += 1;
        }
        assert!(compared >= 700, "{kind:?}: {compared}");
    }
}

#[test]
fn classic_hdm_settles_but_osgm_keeps_leaving() {
    let kappa = 10.0;
    let lam = Vector::from_vec(vec![1.0, kappa]);
    let s0 = DynState::new(0.5 / kappa, Vector::from_vec(vec![1.0, 1.0])).unwrap();
    let center = 2.0 / (kappa + 1.0);
    let hdm = stepsize_path(MapKind::Hdm, &s0, &lam, 1.0 / kappa, 5000).unwrap();
    assert!(stays_in_band(&hdm, center, 0.05, 2000));
    let osgm = stepsize_path(MapKind::Osgm, &s0, &lam, 1.0 / kappa, 5000).unwrap();
    assert!(band_exits(&osgm, center, 0.05, 2000) >= 10);
}

#[test]
fn spike_reproduction() {
    let start = Instant::now();
    let sc = spike_scenario(1e4, 1e-4, 200).unwrap();
    assert!(sc.max_ratio > 1.0);
    assert!(sc.delta >= 1e-300 && sc.delta <= 1e-2);
    let mono = spike_monotone_replay(&sc).unwrap();
    let f1 = mono.records[0].f;
    assert!(mono.f_column().iter().all(|f| *f <= f1));
    assert!(start.elapsed().as_secs_f64() < 30.0);
    eprintln!("δ = {:e}, onset {}, ratio {:e}", sc.delta, sc.onset, sc.max_ratio);
}

#[test]
fn half_rate_spike_and_increase_phase() {
    let kappa = 1e4;
    let eta = 0.5 / kappa;
    let sc = spike_scenario(kappa, eta, 150).unwrap();
    assert!(sc.max_ratio > 1.0);
    let obj = spike_objective(kappa).unwrap();
    let t = run(&obj, &spike_config(Algorithm::OsgmH, eta, sc.delta, 400).recording_iterates()).unwrap();
    assert!(increase_phase_violations(&t, kappa, eta).is_empty());
}

#[test]
fn sweep_csv_shape() {
    let rows = spectral_sweep(&[2.0, 4.0], 2, 1.0).unwrap();
    let csv = sweep_csv(&rows);
    assert!(csv.starts_with(SWEEP_CSV_HEADER));
    assert_eq!(csv.lines().count(), 5);
    assert!(rows.iter().filter(|r| r.kind == MapKind::Osgm).all(|r| r.abs_err < 1e-6));
}
