use super::objective::{Metadata, Objective, SmoothFunction};
use crate::linalg::CsrMatrix;
use crate::{OsgmError, Result, Vector};
use std::sync::Arc;

/// Design matrix with labels in {−1, +1}.
#[derive(Clone, Debug, PartialEq)]
pub struct LabeledDesign {
    pub a: CsrMatrix,
    pub labels: Vec<f64>,
}

impl LabeledDesign {
    pub fn new(a: CsrMatrix, labels: Vec<f64>) -> Result<Self> {
        if a.n_rows == 0 || a.n_cols == 0 {
            return Err(OsgmError::InvalidInput("empty dataset".into()));
        }
        if labels.len() != a.n_rows {
            return Err(OsgmError::InvalidInput(format!("{} labels for {} rows", labels.len(), a.n_rows)));
        }
        if let Some(bad) = labels.iter().find(|&&y| y != 1.0 && y != -1.0) {
            return Err(OsgmError::InvalidInput(format!("label {bad} is not in {{-1, +1}}")));
        }
        Ok(LabeledDesign { a, labels })
    }

    pub fn n_samples(&self) -> usize {
        self.a.n_rows
    }
    pub fn n_features(&self) -> usize {
        self.a.n_cols
    }

    fn margins(&self, x: &Vector) -> Vec<f64> {
        (0..self.n_samples()).map(|i| self.labels[i] * self.a.row_dot(i, x)).collect()
    }
}

const SPECTRAL_RTOL: f64 = 1e-8;

fn softplus(t: f64) -> f64 {
    t.max(0.0) + (-t.abs()).exp().ln_1p()
}

fn sigmoid(t: f64) -> f64 {
    if t >= 0.0 {
        1.0 / (1.0 + (-t).exp())
    } else {
        let e = t.exp();
        e / (1.0 + e)
    }
}

/// `(1/m) Σ log(1 + exp(−yᵢ⟨aᵢ, x⟩)) + (reg/2)‖x‖²`.
#[derive(Clone, Debug)]
pub struct Logistic {
    data: LabeledDesign,
    reg: f64,
}

impl SmoothFunction for Logistic {
    fn dim(&self) -> usize {
        self.data.n_features()
    }
    fn value(&self, x: &Vector) -> f64 {
        let m = self.data.n_samples() as f64;
        let loss: f64 = self.data.margins(x).iter().map(|&t| softplus(-t)).sum();
        loss / m + 0.5 * self.reg * x.norm_squared()
    }
    fn gradient(&self, x: &Vector) -> Vector {
        self.value_gradient(x).1
    }
    fn value_gradient(&self, x: &Vector) -> (f64, Vector) {
        let m = self.data.n_samples() as f64;
        let t = self.data.margins(x);
        let loss: f64 = t.iter().map(|&ti| softplus(-ti)).sum();
        let w = Vector::from_fn(t.len(), |i, _| -self.data.labels[i] * sigmoid(-t[i]) / m);
        let g = self.data.a.tr_mul_vec(&w) + x * self.reg;
        (loss / m + 0.5 * self.reg * x.norm_squared(), g)
    }
    fn hvp(&self, x: &Vector, v: &Vector) -> Option<Vector> {
        let m = self.data.n_samples() as f64;
        let t = self.data.margins(x);
        let av = self.data.a.mul_vec(v);
        let w = Vector::from_fn(t.len(), |i, _| {
            let s = sigmoid(t[i]);
            s * (1.0 - s) * av[i] / m
        });
        Some(self.data.a.tr_mul_vec(&w) + v * self.reg)
    }
    fn has_hvp(&self) -> bool {
        true
    }
}

/// ℓ2-regularized logistic regression.
///
/// `L = ‖AᵀA‖₂/(4m) + reg` with the spectral norm from power iteration; the
/// Hessian Lipschitz constant uses `max|σ''| = 1/(6√3)`.
pub fn make_logistic(data: LabeledDesign, reg: f64) -> Result<Objective> {
    if !(reg >= 0.0) {
        return Err(OsgmError::InvalidParameter("reg must be nonnegative".into()));
    }
    let m = data.n_samples() as f64;
    let gram = data.a.gram_norm(SPECTRAL_RTOL);
    let max_row = (0..data.n_samples()).map(|i| data.a.row_norm(i)).fold(0.0, f64::max);
    let meta = Metadata {
        smoothness: (gram / (4.0 * m) + reg).max(f64::MIN_POSITIVE),
        strong_convexity: (reg > 0.0).then_some(reg),
        fstar: None,
        hessian_lipschitz: Some(max_row * gram / (m * 6.0 * 3f64.sqrt())),
        convex: true,
        quadratic: false,
        minimizer: None,
    };
    let name = format!("logistic-m{}-n{}", data.n_samples(), data.n_features());
    Ok(Objective::new(name, Arc::new(Logistic { data, reg }), meta))
}

/// `(1/(2m)) Σ max(0, 1 − yᵢ⟨aᵢ, x⟩)² + (reg/2)‖x‖²`.
#[derive(Clone, Debug)]
pub struct SquaredHingeSvm {
    data: LabeledDesign,
    reg: f64,
}

impl SmoothFunction for SquaredHingeSvm {
    fn dim(&self) -> usize {
        self.data.n_features()
    }
    fn value(&self, x: &Vector) -> f64 {
        let m = self.data.n_samples() as f64;
        let loss: f64 = self.data.margins(x).iter().map(|&t| (1.0 - t).max(0.0).powi(2)).sum();
        0.5 * loss / m + 0.5 * self.reg * x.norm_squared()
    }
    fn gradient(&self, x: &Vector) -> Vector {
        self.value_gradient(x).1
    }
    fn value_gradient(&self, x: &Vector) -> (f64, Vector) {
        let m = self.data.n_samples() as f64;
        let t = self.data.margins(x);
        let loss: f64 = t.iter().map(|&ti| (1.0 - ti).max(0.0).powi(2)).sum();
        let w = Vector::from_fn(t.len(), |i, _| -self.data.labels[i] * (1.0 - t[i]).max(0.0) / m);
        let g = self.data.a.tr_mul_vec(&w) + x * self.reg;
        (0.5 * loss / m + 0.5 * self.reg * x.norm_squared(), g)
    }
    fn hvp(&self, x: &Vector, v: &Vector) -> Option<Vector> {
        let m = self.data.n_samples() as f64;
        let t = self.data.margins(x);
        let av = self.data.a.mul_vec(v);
        let w = Vector::from_fn(t.len(), |i, _| if t[i] < 1.0 { av[i] / m } else { 0.0 });
        Some(self.data.a.tr_mul_vec(&w) + v * self.reg)
    }
    fn has_hvp(&self) -> bool {
        true
    }
}

/// Squared-hinge SVM; `L = ‖AᵀA‖₂/m + reg`.
pub fn make_smooth_svm(data: LabeledDesign, reg: f64) -> Result<Objective> {
    if !(reg >= 0.0) {
        return Err(OsgmError::InvalidParameter("reg must be nonnegative".into()));
    }
    let m = data.n_samples() as f64;
    let gram = data.a.gram_norm(SPECTRAL_RTOL);
    let meta = Metadata {
        smoothness: (gram / m + reg).max(f64::MIN_POSITIVE),
        strong_convexity: (reg > 0.0).then_some(reg),
        fstar: None,
        hessian_lipschitz: None,
        convex: true,
        quadratic: false,
        minimizer: None,
    };
    let name = format!("svm-m{}-n{}", data.n_samples(), data.n_features());
    Ok(Objective::new(name, Arc::new(SquaredHingeSvm { data, reg }), meta))
}
