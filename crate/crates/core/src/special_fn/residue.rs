//! Residue series for `G^{n,0}_{0,n}(x | 0,…,0)` and its termwise integral.
//!
//! Near the pole `s = -j`, with `ε = s + j`,
//!
//! ```text
//! (s + j) Γ(s) = (-1)^j / j! · exp(ψ(j+1) ε + Σ_{k≥2} c_k(j) ε^k),
//! c_k(j) = ((-1)^k ζ(k) + H_j^{(k)}) / k,
//! ```
//!
//! so the residue of `x^{-s} Γ(s)^n` is `(-1)^{jn} x^j / (j!)^n` times the
//! `ε^{n-1}` coefficient of `exp(n Σ c_k ε^k - ε ln x)`. Only orders below `n`
//! are needed, which makes the expansion a short power-series exponential.
//!
//! For large `x` the terms grow like `exp(n x^{1/n})` while the sum decays
//! like `exp(-n x^{1/n})`, so the series is summed in MPFR with the working
//! precision raised until the measured cancellation leaves a safe margin.

use rug::float::Constant;
use rug::Float;

use super::MeijerGConfig;
use crate::error::{Error, Result};

const START_PRECISION: u32 = 128;
const MAX_PRECISION: u32 = 16_384;
/// Bits of accuracy demanded after cancellation.
const GUARD_BITS: f64 = 72.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum SeriesKind {
    /// `G^{n,0}_{0,n}(x | 0,…,0)` itself.
    Density,
    /// `∫_0^x y^{k-1} G^{n,0}_{0,n}(y | 0,…,0) dy / Γ(k)^n`.
    Cdf { k: u32 },
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct SeriesSum {
    pub log_value: f64,
    pub rel_error: f64,
    pub terms: usize,
}

struct Attempt {
    sum: Float,
    lost_bits: f64,
    terms: usize,
    tail_rel: f64,
}

pub(crate) fn residue_series(x: f64, n: u32, kind: SeriesKind, cfg: &MeijerGConfig) -> Result<SeriesSum> {
    let mut prec = START_PRECISION;
    loop {
        let attempt = sum_at_precision(x, n, kind, cfg, prec)?;
        let positive = attempt.sum.is_sign_positive() && !attempt.sum.is_zero();
        let margin = f64::from(prec) - attempt.lost_bits;
        if positive && margin >= GUARD_BITS {
            let log_sum = Float::with_val(prec, attempt.sum.ln_ref());
            let log_value = match kind {
                SeriesKind::Density => log_sum.to_f64(),
                SeriesKind::Cdf { k } => {
                    let xf = Float::with_val(prec, x);
                    let mut lg = Float::with_val(prec, k);
                    lg.ln_gamma_mut();
                    let log = log_sum + Float::with_val(prec, xf.ln_ref()) * k - lg * n;
                    log.to_f64()
                }
            };
            let rounding = (attempt.terms as f64) * (-margin).exp2();
            return Ok(SeriesSum {
                log_value,
                rel_error: attempt.tail_rel + rounding,
                terms: attempt.terms,
            });
        }
        if prec >= MAX_PRECISION {
            return Err(Error::Accuracy {
                est_error: (-margin).exp2(),
                tol: cfg.series_tol,
            });
        }
        let wanted = if positive && attempt.lost_bits.is_finite() {
            (attempt.lost_bits + GUARD_BITS + 32.0).ceil() as u32
        } else {
            prec * 4
        };
        prec = wanted.max(prec * 2).min(MAX_PRECISION);
    }
}

fn sum_at_precision(x: f64, n: u32, kind: SeriesKind, cfg: &MeijerGConfig, prec: u32) -> Result<Attempt> {
    let nu = n as usize;
    let xf = Float::with_val(prec, x);
    let lx = Float::with_val(prec, xf.ln_ref());
    let euler = Float::with_val(prec, Constant::Euler);
    // zeta[k] = ζ(k) for 2 <= k < n.
    let zeta: Vec<Float> = (0..nu)
        .map(|k| {
            if k >= 2 {
                Float::with_val(prec, Float::zeta_u(k as u32))
            } else {
                Float::new(prec)
            }
        })
        .collect();

    // lpow[i] = (ln x)^i / i!
    let mut lpow = Vec::with_capacity(nu);
    lpow.push(Float::with_val(prec, 1));
    for i in 1..nu {
        let next = Float::with_val(prec, &lpow[i - 1] * &lx) / (i as u32);
        lpow.push(next);
    }

    let mut harmonic: Vec<Float> = (0..nu).map(|_| Float::new(prec)).collect();
    let mut prefactor = Float::with_val(prec, 1);
    let mut b: Vec<Float> = (0..nu).map(|_| Float::new(prec)).collect();
    let mut e: Vec<Float> = (0..nu).map(|_| Float::new(prec)).collect();
    let mut inv_pow: Vec<Float> = (0..nu).map(|_| Float::new(prec)).collect();

    let mut sum = Float::new(prec);
    let mut abs_sum = Float::new(prec);
    let mut small_run = 0usize;
    let mut last_abs = Float::new(prec);
    let mut terms = 0usize;
    let tol = cfg.series_tol;

    for j in 0..cfg.max_terms {
        if j > 0 {
            let jf = Float::with_val(prec, j as u64);
            let mut inv_j_pow = Float::with_val(prec, 1);
            for h in harmonic.iter_mut().skip(1) {
                inv_j_pow /= &jf;
                *h += &inv_j_pow;
            }
            prefactor *= &xf;
            for _ in 0..n {
                prefactor /= &jf;
            }
            if n % 2 == 1 {
                prefactor = -prefactor;
            }
        }

        // Local expansion exponent: b[1] = n ψ(j+1), b[k] = n c_k(j).
        if nu > 1 {
            b[1] = Float::with_val(prec, &harmonic[1] - &euler) * n;
            for k in 2..nu {
                let mut ck = zeta[k].clone();
                if k % 2 == 1 {
                    ck = -ck;
                }
                ck += &harmonic[k];
                b[k] = ck * n / (k as u32);
            }
        }
        // e = exp(Σ b_k ε^k) truncated at ε^{n-1}.
        e[0] = Float::with_val(prec, 1);
        for m in 1..nu {
            let mut acc = Float::new(prec);
            for i in 1..=m {
                acc += Float::with_val(prec, &b[i] * &e[m - i]) * (i as u32);
            }
            e[m] = acc / (m as u32);
        }

        let bracket = match kind {
            SeriesKind::Density => {
                // Σ_m e[n-1-m] (-ln x)^m / m!
                let mut acc = Float::new(prec);
                for m in 0..nu {
                    let t = Float::with_val(prec, &e[nu - 1 - m] * &lpow[m]);
                    if m % 2 == 0 {
                        acc += t;
                    } else {
                        acc -= t;
                    }
                }
                acc
            }
            SeriesKind::Cdf { k } => {
                // (1/m!) ∫_0^x y^{p-1} (ln y)^m dy
                //   = x^p Σ_{i=0}^m (-1)^i (ln x)^{m-i} / ((m-i)! p^{i+1}),
                // with the common x^k pulled out of the whole sum.
                let p = Float::with_val(prec, j as u64 + u64::from(k));
                let mut acc_pow = Float::with_val(prec, 1);
                for slot in inv_pow.iter_mut() {
                    acc_pow /= &p;
                    *slot = acc_pow.clone();
                }
                let mut acc = Float::new(prec);
                for m in 0..nu {
                    let mut inner = Float::new(prec);
                    for i in 0..=m {
                        let t = Float::with_val(prec, &lpow[m - i] * &inv_pow[i]);
                        if i % 2 == 0 {
                            inner += t;
                        } else {
                            inner -= t;
                        }
                    }
                    let t = inner * &e[nu - 1 - m];
                    if m % 2 == 0 {
                        acc += t;
                    } else {
                        acc -= t;
                    }
                }
                acc
            }
        };

        let term = bracket * &prefactor;
        let term_abs = Float::with_val(prec, term.abs_ref());
        sum += &term;
        abs_sum += &term_abs;
        terms = j + 1;

        let threshold = Float::with_val(prec, sum.abs_ref()) * tol;
        if term_abs <= threshold {
            small_run += 1;
            if small_run >= 3 {
                last_abs = term_abs;
                break;
            }
        } else {
            small_run = 0;
        }
        last_abs = term_abs;
    }

    if small_run < 3 {
        return Err(Error::NonConvergence { terms });
    }

    let sum_abs = Float::with_val(prec, sum.abs_ref());
    let lost_bits = if sum_abs.is_zero() {
        f64::INFINITY
    } else {
        (Float::with_val(prec, abs_sum.log2_ref()) - sum_abs.clone().log2()).to_f64().max(0.0)
    };
    let tail_rel = if sum_abs.is_zero() {
        f64::INFINITY
    } else {
        2.0 * (last_abs / &sum_abs).to_f64()
    };
    Ok(Attempt {
        sum,
        lost_bits,
        terms,
        tail_rel,
    })
}
