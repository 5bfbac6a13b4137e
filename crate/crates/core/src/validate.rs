//! Two-sample Kolmogorov–Smirnov test and the radii-versus-eigenvalues check.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ensemble::EnsembleParams;
use crate::error::{Error, Result};
use crate::sampler::{eigen_moduli, sample_product_matrix, sample_radii, substream};

/// Largest matrix size accepted by [`validate_theorem1`].
pub const MAX_VALIDATE_SIZE: usize = 16;
/// Smallest number of draws accepted by [`validate_theorem1`].
pub const MIN_VALIDATE_DRAWS: usize = 500;

/// Matrix draws share one substream per block of this many.
const MATRIX_BLOCK: usize = 64;
/// Matrix substreams are numbered from here, clear of the radii streams.
const MATRIX_STREAM_BASE: u64 = 1 << 40;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KSResult {
    pub statistic: f64,
    pub p_value: f64,
    pub sizes: (usize, usize),
}

/// `Q_KS(λ) = 2 Σ_{j≥1} (-1)^{j-1} exp(-2 j² λ²)`.
fn kolmogorov_q(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    if lambda < 1.18 {
        // Theta-function form, converges fast for small λ.
        let y = (-std::f64::consts::PI.powi(2) / (8.0 * lambda * lambda)).exp();
        let y8 = y.powi(8);
        let s = y * (1.0 + y8 * (1.0 + y8 * y8 * (1.0 + y8 * y8 * y8)));
        (1.0 - (2.0 * std::f64::consts::PI).sqrt() / lambda * s).clamp(0.0, 1.0)
    } else {
        let mut sum = 0.0;
        let mut sign = 1.0;
        for j in 1..=100 {
            let jf = f64::from(j);
            let t = (-2.0 * jf * jf * lambda * lambda).exp();
            sum += sign * t;
            if t < 1e-20 {
                break;
            }
            sign = -sign;
        }
        (2.0 * sum).clamp(0.0, 1.0)
    }
}

/// Two-sample Kolmogorov–Smirnov statistic with the asymptotic p-value
/// evaluated at `(√m + 0.12 + 0.11/√m) D`, `m = n_a n_b / (n_a + n_b)`.
pub fn gof_ks(sample_a: &[f64], sample_b: &[f64]) -> Result<KSResult> {
    if sample_a.is_empty() || sample_b.is_empty() {
        return Err(Error::EmptySample);
    }
    let mut a = sample_a.to_vec();
    let mut b = sample_b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len(), b.len());
    let (mut i, mut j) = (0usize, 0usize);
    let mut d: f64 = 0.0;
    while i < na && j < nb {
        // Step past every copy of the smaller value so ties move both ECDFs.
        let x = a[i].min(b[j]);
        while i < na && a[i] == x {
            i += 1;
        }
        while j < nb && b[j] == x {
            j += 1;
        }
        d = d.max((i as f64 / na as f64 - j as f64 / nb as f64).abs());
    }
    let m = (na * nb) as f64 / (na + nb) as f64;
    let sm = m.sqrt();
    let p_value = if d == 0.0 {
        1.0
    } else {
        kolmogorov_q((sm + 0.12 + 0.11 / sm) * d)
    };
    Ok(KSResult {
        statistic: d,
        p_value,
        sizes: (na, nb),
    })
}

/// Sorted squared eigenvalue moduli of `draws` independent products, one
/// vector per draw. Draws are grouped in blocks of 64 sharing a substream.
pub fn eigen_moduli_sq_batch(params: EnsembleParams, draws: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
    params.finite_size()?;
    let nblocks = draws.div_ceil(MATRIX_BLOCK);
    let blocks: Vec<Vec<Vec<f64>>> = (0..nblocks)
        .into_par_iter()
        .map(|b| -> Result<Vec<Vec<f64>>> {
            let mut rng = substream(seed, MATRIX_STREAM_BASE + b as u64);
            let len = MATRIX_BLOCK.min(draws - b * MATRIX_BLOCK);
            let mut out = Vec::with_capacity(len);
            for i in 0..len {
                let m = sample_product_matrix(params, &mut rng)?;
                let moduli = eigen_moduli(&m).map_err(|e| match e {
                    Error::EigenFailure { dim, .. } => Error::EigenFailure {
                        dim,
                        seed: Some(seed),
                        draw: Some((b * MATRIX_BLOCK + i) as u64),
                    },
                    other => other,
                })?;
                out.push(moduli.iter().map(|x| x * x).collect());
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    Ok(blocks.concat())
}

/// Squared eigenvalue moduli of `draws` independent products, pooled.
pub fn pooled_eigen_moduli_sq(params: EnsembleParams, draws: usize, seed: u64) -> Result<Vec<f64>> {
    Ok(eigen_moduli_sq_batch(params, draws, seed)?.concat())
}

/// Pooled squared radii from `draws` rows of [`sample_radii`].
pub fn pooled_radii_sq(params: EnsembleParams, draws: usize, seed: u64) -> Result<Vec<f64>> {
    Ok(sample_radii(params, draws, seed)?.batch.concat())
}

fn check_validate(size: usize, draws: usize) -> Result<()> {
    if size > MAX_VALIDATE_SIZE {
        return Err(Error::TooLarge {
            what: "N",
            value: size,
            max: MAX_VALIDATE_SIZE,
        });
    }
    if draws < MIN_VALIDATE_DRAWS {
        return Err(Error::InvalidConfig(format!(
            "at least {MIN_VALIDATE_DRAWS} draws required, got {draws}"
        )));
    }
    Ok(())
}

/// KS comparison of squared eigenvalue moduli of `n`-fold products against
/// squared radii built from Gamma products with `n_radii` factors.
pub fn validate_radii_vs_matrix(n_matrix: u32, n_radii: u32, size: usize, draws: usize, seed: u64) -> Result<KSResult> {
    check_validate(size, draws)?;
    let mat = pooled_eigen_moduli_sq(EnsembleParams::finite(n_matrix, size)?, draws, seed)?;
    let rad = pooled_radii_sq(EnsembleParams::finite(n_radii, size)?, draws, seed)?;
    gof_ks(&mat, &rad)
}

/// The eigenvalue moduli of `X_1 ⋯ X_n` have the law of independent radii
/// `(R_k)² = ∏_{i≤n} Gamma_i(k)`: KS test on the two pooled samples.
pub fn validate_theorem1(n: u32, size: usize, draws: usize, seed: u64) -> Result<KSResult> {
    validate_radii_vs_matrix(n, n, size, draws, seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_samples() {
        let a = [0.3, 0.1, 0.7, 0.7];
        let r = gof_ks(&a, &a).unwrap();
        assert_eq!(r.statistic, 0.0);
        assert_eq!(r.p_value, 1.0);
    }

    #[test]
    fn disjoint_samples() {
        let a: Vec<f64> = (0..50).map(f64::from).collect();
        let b: Vec<f64> = (100..150).map(f64::from).collect();
        let r = gof_ks(&a, &b).unwrap();
        assert_eq!(r.statistic, 1.0);
        assert!(r.p_value < 1e-10);
    }

    #[test]
    fn kolmogorov_branches_meet() {
        let lo = kolmogorov_q(1.18 - 1e-12);
        let hi = kolmogorov_q(1.18);
        assert!((lo - hi).abs() < 1e-9);
        // Q(1.3581) ≈ 0.05
        assert!((kolmogorov_q(1.358_1) - 0.05).abs() < 1e-4);
    }

    #[test]
    fn empty_rejected() {
        assert_eq!(gof_ks(&[], &[1.0]), Err(Error::EmptySample));
    }

    #[test]
    fn validate_rejects_out_of_range() {
        assert!(matches!(validate_theorem1(1, 17, 500, 0), Err(Error::TooLarge { .. })));
        assert!(matches!(validate_theorem1(1, 2, 10, 0), Err(Error::InvalidConfig(_))));
    }
}
