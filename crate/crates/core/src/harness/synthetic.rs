//! Seeded synthetic instances standing in for benchmark datasets.

use super::libsvm::SparseDataset;
use crate::problems::{make_lasso, make_logistic, make_smooth_svm, with_reference_fstar, CompositeObjective, Objective, QuadraticProblem};
use crate::{Matrix, OsgmError, Result, Vector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SyntheticKind {
    Quadratic,
    Logistic,
    Svm,
    Lasso,
}

/// `n` features, `m` samples (ignored for quadratics), target `κ = L/μ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub kind: SyntheticKind,
    pub n: usize,
    #[serde(default)]
    pub m: usize,
    pub kappa: f64,
    pub seed: u64,
}

impl SyntheticSpec {
    pub fn name(&self) -> String {
        let kind = match self.kind {
            SyntheticKind::Quadratic => "quadratic",
            SyntheticKind::Logistic => "logistic",
            SyntheticKind::Svm => "svm",
            SyntheticKind::Lasso => "lasso",
        };
        format!("{kind}-n{}-m{}-k{}-s{}", self.n, self.m, self.kappa, self.seed)
    }
}

/// Smooth or composite problem.
#[derive(Clone, Debug)]
pub enum Problem {
    Smooth(Objective),
    Composite(CompositeObjective),
}

impl Problem {
    pub fn smooth(&self) -> &Objective {
        match self {
            Problem::Smooth(o) => o,
            Problem::Composite(c) => &c.smooth,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SyntheticInstance {
    pub name: String,
    pub problem: Problem,
    /// Data behind the instance; `None` for quadratics.
    pub dataset: Option<SparseDataset>,
}

/// Fraction of nonzero features per sample.
const DENSITY: f64 = 0.3;

fn classification_data(n: usize, m: usize, rng: &mut ChaCha8Rng) -> SparseDataset {
    let w: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
    let mut rows = Vec::with_capacity(m);
    let mut labels = Vec::with_capacity(m);
    for _ in 0..m {
        let mut row = Vec::new();
        for j in 1..=n {
            if rng.random::<f64>() < DENSITY {
                row.push((j, rng.sample(StandardNormal)));
            }
        }
        let score: f64 = row.iter().map(|&(j, v)| v * w[j - 1]).sum::<f64>() + 0.5 * rng.sample::<f64, _>(StandardNormal);
        labels.push(if score >= 0.0 { 1.0 } else { -1.0 });
        rows.push(row);
    }
    SparseDataset { rows, labels, n_features: n }
}

/// Regularization making `L/μ = κ` for a loss with curvature bound `c`.
fn reg_for(c: f64, kappa: f64) -> f64 {
    c / (kappa - 1.0)
}

pub fn generate(spec: &SyntheticSpec) -> Result<SyntheticInstance> {
    if spec.n == 0 || !(spec.kappa > 1.0) || !spec.kappa.is_finite() {
        return Err(OsgmError::InvalidParameter(format!("need n > 0 and finite κ > 1, got n = {}, κ = {}", spec.n, spec.kappa)));
    }
    if spec.kind != SyntheticKind::Quadratic && spec.m == 0 {
        return Err(OsgmError::InvalidParameter("data-driven instances need m > 0".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let name = spec.name();
    match spec.kind {
        SyntheticKind::Quadratic => {
            let q = QuadraticProblem::random(spec.n, spec.kappa, true, &mut rng)?;
            Ok(SyntheticInstance { problem: Problem::Smooth(q.objective().with_name(name.clone())), name, dataset: None })
        }
        SyntheticKind::Logistic | SyntheticKind::Svm => {
            let ds = classification_data(spec.n, spec.m, &mut rng);
            let design = ds.to_design()?;
            let m = spec.m as f64;
            let gram = design.a.gram_norm(1e-8);
            let obj = if spec.kind == SyntheticKind::Logistic {
                make_logistic(design, reg_for(gram / (4.0 * m), spec.kappa))?
            } else {
                make_smooth_svm(design, reg_for(gram / m, spec.kappa))?
            };
            let obj = with_reference_fstar(obj.with_name(name.clone()));
            Ok(SyntheticInstance { problem: Problem::Smooth(obj), name, dataset: Some(ds) })
        }
        SyntheticKind::Lasso => {
            let a = Matrix::from_fn(spec.m, spec.n, |_, _| rng.sample(StandardNormal));
            let x_true = Vector::from_fn(spec.n, |i, _| if i % 3 == 0 { rng.sample(StandardNormal) } else { 0.0 });
            let noise = Vector::from_fn(spec.m, |_, _| 0.1 * rng.sample::<f64, _>(StandardNormal));
            let b = &a * x_true + noise;
            let weight = 0.1 * crate::linalg::norm_inf(&(a.transpose() * &b)) / spec.m as f64;
            let mut comp = make_lasso(&a, &b, weight)?;
            comp.smooth = comp.smooth.clone().with_name(name.clone());
            let (_, phistar) = comp.solve_reference(&Vector::zeros(spec.n), 1e-10, 200_000);
            let rows = (0..spec.m).map(|i| (0..spec.n).map(|j| (j + 1, a[(i, j)])).collect()).collect();
            let ds = SparseDataset { rows, labels: b.iter().copied().collect(), n_features: spec.n };
            Ok(SyntheticInstance { problem: Problem::Composite(comp.with_phistar(phistar)), name, dataset: Some(ds) })
        }
    }
}

/// Three quadratics (`κ ∈ {10, 10², 10³}`), three logistic and three SVM
/// instances, all seeded from `seed`.
pub fn synthetic_suite(seed: u64) -> Vec<SyntheticSpec> {
    let mut out = Vec::new();
    for (i, kappa) in [10.0, 100.0, 1000.0].into_iter().enumerate() {
        out.push(SyntheticSpec { kind: SyntheticKind::Quadratic, n: 50, m: 0, kappa, seed: seed + i as u64 });
    }
    for (i, kappa) in [10.0, 100.0, 1000.0].into_iter().enumerate() {
        out.push(SyntheticSpec { kind: SyntheticKind::Logistic, n: 20, m: 200, kappa, seed: seed + 10 + i as u64 });
    }
    for (i, kappa) in [10.0, 100.0, 1000.0].into_iter().enumerate() {
        out.push(SyntheticSpec { kind: SyntheticKind::Svm, n: 20, m: 200, kappa, seed: seed + 20 + i as u64 });
    }
    out
}

/// Random LIBSVM-shaped dataset with tiny, huge and integral values, empty
/// rows and sometimes unused trailing features.  Negative zero is folded to 0.
pub fn random_dataset(seed: u64) -> SparseDataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = rng.random_range(1..30);
    let n = rng.random_range(1..40);
    let mut rows = Vec::with_capacity(m);
    let mut labels = Vec::with_capacity(m);
    for _ in 0..m {
        let density: f64 = rng.random();
        let mut row = Vec::new();
        for j in 1..=n {
            if rng.random::<f64>() >= density {
                continue;
            }
            let v: f64 = match rng.random_range(0..5) {
                0 => rng.random_range(-5..=5) as f64,
                1 => rng.sample::<f64, _>(StandardNormal) * 1e-300,
                2 => rng.sample::<f64, _>(StandardNormal) * 1e300,
                _ => rng.sample(StandardNormal),
            };
            row.push((j, if v == 0.0 { 0.0 } else { v }));
        }
        labels.push(if rng.random::<bool>() { 1.0 } else { -1.0 });
        rows.push(row);
    }
    let n_features = n + if rng.random::<bool>() { rng.random_range(0..5) } else { 0 };
    SparseDataset { rows, labels, n_features }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::libsvm::{parse_libsvm, serialize_libsvm};

    #[test]
    fn quadratic_condition_number() {
        let inst = generate(&SyntheticSpec { kind: SyntheticKind::Quadratic, n: 30, m: 0, kappa: 100.0, seed: 1 }).unwrap();
        let o = inst.problem.smooth();
        let k = o.smoothness() / o.strong_convexity().unwrap();
        assert!((99.0..=101.0).contains(&k));
    }

    #[test]
    fn logistic_file_round_trips_and_is_deterministic() {
        let spec = SyntheticSpec { kind: SyntheticKind::Logistic, n: 20, m: 200, kappa: 50.0, seed: 7 };
        let a = serialize_libsvm(generate(&spec).unwrap().dataset.as_ref().unwrap());
        let b = serialize_libsvm(generate(&spec).unwrap().dataset.as_ref().unwrap());
        assert_eq!(a, b);
        assert_eq!(serialize_libsvm(&parse_libsvm(&a).unwrap()), a);
        let inst = generate(&spec).unwrap();
        let o = inst.problem.smooth();
        assert!((o.smoothness() / o.strong_convexity().unwrap() - 50.0).abs() < 1e-9 * 50.0);
    }
}
