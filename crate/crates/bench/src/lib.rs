//! Fixtures shared by the benchmarks.

use osgm::harness::{random_dataset, serialize_libsvm};
use osgm::{HBState, Objective, QuadraticProblem, Vector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn quadratic(n: usize, kappa: f64, seed: u64) -> QuadraticProblem {
    QuadraticProblem::random(n, kappa, true, &mut ChaCha8Rng::seed_from_u64(seed)).expect("valid quadratic")
}

pub fn point(n: usize, seed: u64) -> Vector {
    osgm::linalg::random_unit_vector(n, &mut ChaCha8Rng::seed_from_u64(seed))
}

pub fn hb_state(n: usize, seed: u64) -> HBState {
    HBState { z1: point(n, seed), z2: point(n, seed + 1) }
}

pub fn quadratic_objective(n: usize, kappa: f64) -> Objective {
    quadratic(n, kappa, 0).objective()
}

/// Concatenated LIBSVM text of a few random datasets.
pub fn libsvm_text(datasets: u64) -> String {
    (0..datasets).map(|s| serialize_libsvm(&random_dataset(s))).collect::<Vec<_>>().join("")
}
