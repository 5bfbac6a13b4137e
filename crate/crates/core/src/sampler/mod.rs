//! Monte Carlo pipelines: squared radii as products of Gamma variables, and
//! eigenvalue moduli of explicit matrix products.
//!
//! Every batch is split into fixed-size blocks and block `b` draws from
//! substream `b` of the master seed, so results do not depend on how many
//! threads run the blocks.

mod eigen;
mod matrix;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ensemble::EnsembleParams;
use crate::error::{Error, Result};

pub use eigen::eigenvalues;
pub use matrix::{eigen_moduli, sample_product_matrix, ScaledMatrix, MAX_EIGEN_DIM};

/// Draws handled by one substream.
pub const BLOCK: usize = 4096;

/// Random stream used by every sampler.
pub type Stream = ChaCha8Rng;

/// Substream `index` of the master `seed`.
pub fn substream(seed: u64, index: u64) -> Stream {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// A uniform draw from `(0, 1]`.
#[inline]
fn open_uniform<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    1.0 - rng.random::<f64>()
}

/// One Gamma(k, 1) variate by Marsaglia–Tsang squeeze-and-reject.
pub fn sample_gamma<R: Rng + ?Sized>(k: u32, rng: &mut R) -> f64 {
    assert!(k >= 1, "shape must be at least 1");
    let d = f64::from(k) - 1.0 / 3.0;
    let c = 1.0 / (9.0 * d).sqrt();
    loop {
        let x: f64 = rng.sample(StandardNormal);
        let t = 1.0 + c * x;
        if t <= 0.0 {
            continue;
        }
        let v = t * t * t;
        let u = open_uniform(rng);
        let x2 = x * x;
        if u < 1.0 - 0.0331 * x2 * x2 || u.ln() < 0.5 * x2 + d * (1.0 - v + v.ln()) {
            return d * v;
        }
    }
}

/// One Gamma(k, 1) variate as a sum of `k` unit exponentials; reference path
/// for small shapes.
pub fn sample_gamma_reference<R: Rng + ?Sized>(k: u32, rng: &mut R) -> f64 {
    assert!((1..=16).contains(&k), "reference path covers shapes 1..=16");
    (0..k).map(|_| -open_uniform(rng).ln()).sum()
}

/// A seeded batch of squared-radius vectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadiiSample {
    pub params: EnsembleParams,
    pub seed: u64,
    /// `batch[d][k-1]` is `(R_k)²` in draw `d`.
    pub batch: Vec<Vec<f64>>,
}

/// Fills `out[k-1]` with `(R_k)² = ∏_{i≤n} Gamma_i(k)`, formed as the
/// exponential of a sum of logs.
fn draw_radii(n: u32, out: &mut [f64], rng: &mut Stream) {
    for (idx, slot) in out.iter_mut().enumerate() {
        let k = idx as u32 + 1;
        let log: f64 = (0..n).map(|_| sample_gamma(k, rng).ln()).sum();
        *slot = log.exp();
    }
}

fn blocks(count: usize) -> impl IndexedParallelIterator<Item = (u64, usize)> {
    let nblocks = count.div_ceil(BLOCK);
    (0..nblocks)
        .into_par_iter()
        .map(move |b| (b as u64, BLOCK.min(count - b * BLOCK)))
}

/// `count` independent draws of the squared radii `{(R_1)², …, (R_N)²}`.
pub fn sample_radii(params: EnsembleParams, count: usize, seed: u64) -> Result<RadiiSample> {
    let size = params.finite_size()?;
    let n = params.n;
    let batch = blocks(count)
        .flat_map_iter(|(b, len)| {
            let mut rng = substream(seed, b);
            (0..len)
                .map(|_| {
                    let mut row = vec![0.0; size];
                    draw_radii(n, &mut row, &mut rng);
                    row
                })
                .collect::<Vec<_>>()
        })
        .collect();
    Ok(RadiiSample { params, seed, batch })
}

/// Number of draws among `count` whose squared radii for ranks `1..=ranks`
/// satisfy `accept`. Uses the same streams as [`sample_radii`].
pub fn count_radii<F>(n: u32, ranks: usize, count: usize, seed: u64, accept: F) -> Result<u64>
where
    F: Fn(&[f64]) -> bool + Sync,
{
    if n == 0 {
        return Err(Error::Domain { what: "n", value: 0.0 });
    }
    if ranks == 0 {
        return Err(Error::Domain { what: "ranks", value: 0.0 });
    }
    Ok(blocks(count)
        .map(|(b, len)| {
            let mut rng = substream(seed, b);
            let mut row = vec![0.0; ranks];
            let mut hits = 0u64;
            for _ in 0..len {
                draw_radii(n, &mut row, &mut rng);
                if accept(&row) {
                    hits += 1;
                }
            }
            hits
        })
        .sum())
}

/// Mean and 99% normal-approximation half-width of a binomial proportion.
pub fn binomial_interval(hits: u64, trials: u64) -> (f64, f64) {
    const Z99: f64 = 2.575_829_303_548_901;
    let p = hits as f64 / trials as f64;
    (p, Z99 * (p * (1.0 - p) / trials as f64).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn substreams_differ_and_repeat() {
        let a: u64 = substream(7, 0).random();
        let b: u64 = substream(7, 1).random();
        let c: u64 = substream(7, 0).random();
        assert_ne!(a, b);
        assert_eq!(a, c);
    }

    #[test]
    fn radii_sample_is_deterministic() {
        let p = EnsembleParams::finite(2, 3).unwrap();
        let a = sample_radii(p, 5000, 99).unwrap();
        let b = sample_radii(p, 5000, 99).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.batch.len(), 5000);
        assert!(a.batch.iter().flatten().all(|&x| x > 0.0));
    }

    #[test]
    fn count_matches_sample() {
        let p = EnsembleParams::finite(2, 3).unwrap();
        let s = sample_radii(p, 9000, 5).unwrap();
        let direct = s.batch.iter().filter(|row| row.iter().all(|&x| x > 1.0)).count() as u64;
        let counted = count_radii(2, 3, 9000, 5, |row| row.iter().all(|&x| x > 1.0)).unwrap();
        assert_eq!(direct, counted);
    }

    #[test]
    fn infinite_size_rejected() {
        let p = EnsembleParams::new(1, crate::ensemble::Size::Infinite).unwrap();
        assert_eq!(sample_radii(p, 10, 1), Err(Error::InfiniteSize));
    }
}
