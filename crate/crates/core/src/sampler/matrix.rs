use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::eigen::eigenvalues;
use crate::ensemble::EnsembleParams;
use crate::error::{Error, Result};

/// Largest matrix accepted by [`eigen_moduli`].
pub const MAX_EIGEN_DIM: usize = 64;

/// A square complex matrix stored as `entries × e^{log_scale}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScaledMatrix {
    pub dim: usize,
    /// Row-major.
    pub entries: Vec<Complex64>,
    pub log_scale: f64,
}

impl ScaledMatrix {
    pub fn new(dim: usize, entries: Vec<Complex64>, log_scale: f64) -> Self {
        assert_eq!(entries.len(), dim * dim, "entries must be dim × dim");
        Self {
            dim,
            entries,
            log_scale,
        }
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.entries[i * self.dim + j]
    }

    /// The represented matrix. May overflow for large `log_scale`.
    pub fn unscaled(&self) -> Vec<Complex64> {
        let s = self.log_scale.exp();
        self.entries.iter().map(|z| z * s).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Divides by the power of two nearest the largest entry modulus, so the
    /// rescaling is exact and the maximum lands in `[1/√2, √2]`.
    fn rescale(&mut self) {
        let max = self.max_abs();
        if max == 0.0 || !max.is_finite() {
            return;
        }
        let e = max.log2().round() as i32;
        let f = 2f64.powi(-e);
        for z in &mut self.entries {
            *z *= f;
        }
        self.log_scale += f64::from(e) * std::f64::consts::LN_2;
    }
}

fn gaussian_matrix<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<Complex64> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    (0..dim * dim)
        .map(|_| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            Complex64::new(s * re, s * im)
        })
        .collect()
}

fn matmul(dim: usize, a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); dim * dim];
    for i in 0..dim {
        for k in 0..dim {
            let aik = a[i * dim + k];
            for j in 0..dim {
                out[i * dim + j] += aik * b[k * dim + j];
            }
        }
    }
    out
}

/// `X_1 ⋯ X_n` with i.i.d. standard complex Gaussian entries (`E|x|² = 1`),
/// rescaled after every factor.
pub fn sample_product_matrix<R: Rng + ?Sized>(params: EnsembleParams, rng: &mut R) -> Result<ScaledMatrix> {
    let dim = params.finite_size()?;
    let mut m = ScaledMatrix::new(dim, gaussian_matrix(dim, rng), 0.0);
    m.rescale();
    for _ in 1..params.n {
        let x = gaussian_matrix(dim, rng);
        m.entries = matmul(dim, &m.entries, &x);
        m.rescale();
    }
    Ok(m)
}

/// Sorted eigenvalue moduli of the represented matrix.
pub fn eigen_moduli(mat: &ScaledMatrix) -> Result<Vec<f64>> {
    if mat.dim > MAX_EIGEN_DIM {
        return Err(Error::TooLarge {
            what: "matrix dimension",
            value: mat.dim,
            max: MAX_EIGEN_DIM,
        });
    }
    let eig = eigenvalues(mat.dim, &mat.entries).ok_or(Error::EigenFailure {
        dim: mat.dim,
        seed: None,
        draw: None,
    })?;
    let scale = mat.log_scale.exp();
    let mut out: Vec<f64> = eig.iter().map(|z| z.norm() * scale).collect();
    out.sort_by(f64::total_cmp);
    Ok(out)
}
