//! Small numerical helpers shared by the problem suite and the harness.

use crate::{Matrix, Vector};
use rand::Rng;
use rand_distr::StandardNormal;

/// Infinity norm of a vector; zero for the empty vector.
pub fn norm_inf(v: &Vector) -> f64 {
    v.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
}

/// Draws a standard normal vector and normalizes it to unit length.
pub fn random_unit_vector<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vector {
    loop {
        let v = Vector::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal));
        let nrm = v.norm();
        if nrm > 0.0 {
            return v / nrm;
        }
    }
}

/// Haar-ish random orthogonal matrix from the QR factorization of a Gaussian matrix.
pub fn random_orthogonal<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Matrix {
    let g = Matrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal));
    let qr = g.qr();
    let q = qr.q();
    let r = qr.r();
    // fix column signs so the distribution does not depend on the QR convention
    let mut q = q;
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

/// Largest eigenvalue of a symmetric positive semidefinite operator by power
/// iteration, stopped when the Rayleigh quotient changes by less than `rtol`
/// relatively.
pub fn power_iteration<F>(n: usize, apply: F, rtol: f64, max_iter: usize) -> f64
where
    F: Fn(&Vector) -> Vector,
{
    if n == 0 {
        return 0.0;
    }
    // deterministic, non-degenerate start
    let mut v = Vector::from_fn(n, |i, _| 1.0 + (i as f64 + 1.0).sqrt().fract());
    v /= v.norm();
    let mut est = 0.0;
    for _ in 0..max_iter {
        let w = apply(&v);
        let rq = v.dot(&w);
        let nrm = w.norm();
        if nrm == 0.0 {
            return 0.0;
        }
        v = w / nrm;
        if (rq - est).abs() <= rtol * rq.abs().max(f64::MIN_POSITIVE) {
            return rq.max(est);
        }
        est = rq;
    }
    est
}

/// Compressed sparse row matrix with 0-based column indices.
#[derive(Clone, Debug, PartialEq)]
pub struct CsrMatrix {
    pub n_rows: usize,
    pub n_cols: usize,
    pub indptr: Vec<usize>,
    pub indices: Vec<usize>,
    pub values: Vec<f64>,
}

impl CsrMatrix {
    /// Builds from per-row lists of `(column, value)` with 0-based columns.
    pub fn from_rows(rows: &[Vec<(usize, f64)>], n_cols: usize) -> Self {
        let mut indptr = Vec::with_capacity(rows.len() + 1);
        let mut indices = Vec::new();
        let mut values = Vec::new();
        indptr.push(0);
        for row in rows {
            for &(j, v) in row {
                indices.push(j);
                values.push(v);
            }
            indptr.push(indices.len());
        }
        CsrMatrix { n_rows: rows.len(), n_cols, indptr, indices, values }
    }

    pub fn from_dense(a: &Matrix) -> Self {
        let rows: Vec<Vec<(usize, f64)>> =
            (0..a.nrows()).map(|i| (0..a.ncols()).filter(|&j| a[(i, j)] != 0.0).map(|j| (j, a[(i, j)])).collect()).collect();
        Self::from_rows(&rows, a.ncols())
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let (s, e) = (self.indptr[i], self.indptr[i + 1]);
        self.indices[s..e].iter().copied().zip(self.values[s..e].iter().copied())
    }

    pub fn row_dot(&self, i: usize, x: &Vector) -> f64 {
        self.row(i).map(|(j, v)| v * x[j]).sum()
    }

    pub fn row_norm(&self, i: usize) -> f64 {
        self.row(i).map(|(_, v)| v * v).sum::<f64>().sqrt()
    }

    /// `A x`
    pub fn mul_vec(&self, x: &Vector) -> Vector {
        Vector::from_fn(self.n_rows, |i, _| self.row_dot(i, x))
    }

    /// `Aᵀ y`
    pub fn tr_mul_vec(&self, y: &Vector) -> Vector {
        let mut out = Vector::zeros(self.n_cols);
        for i in 0..self.n_rows {
            let yi = y[i];
            if yi != 0.0 {
                for (j, v) in self.row(i) {
                    out[j] += v * yi;
                }
            }
        }
        out
    }

    /// Spectral norm of `AᵀA` by power iteration.
    pub fn gram_norm(&self, rtol: f64) -> f64 {
        power_iteration(self.n_cols, |v| self.tr_mul_vec(&self.mul_vec(v)), rtol, 100_000)
    }

    pub fn to_dense(&self) -> Matrix {
        let mut a = Matrix::zeros(self.n_rows, self.n_cols);
        for i in 0..self.n_rows {
            for (j, v) in self.row(i) {
                a[(i, j)] += v;
            }
        }
        a
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn power_iteration_matches_dense_eigen() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let b = Matrix::from_fn(12, 7, |_, _| rng.sample::<f64, _>(StandardNormal));
        let csr = CsrMatrix::from_dense(&b);
        let g = b.transpose() * &b;
        let exact = g.symmetric_eigen().eigenvalues.max();
        let est = csr.gram_norm(1e-12);
        assert!((est - exact).abs() <= 1e-8 * exact, "{est} vs {exact}");
    }

    #[test]
    fn orthogonal_is_orthogonal() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let q = random_orthogonal(6, &mut rng);
        let e = q.transpose() * &q - Matrix::identity(6, 6);
        assert!(e.amax() < 1e-12);
    }

    #[test]
    fn csr_products_match_dense() {
        let a = Matrix::from_row_slice(2, 3, &[1.0, 0.0, 2.0, 0.0, -3.0, 0.5]);
        let csr = CsrMatrix::from_dense(&a);
        let x = Vector::from_vec(vec![1.0, 2.0, 3.0]);
        let y = Vector::from_vec(vec![-1.0, 4.0]);
        assert_eq!(csr.mul_vec(&x), &a * &x);
        assert_eq!(csr.tr_mul_vec(&y), a.transpose() * &y);
        assert_eq!(csr.to_dense(), a);
    }
}
