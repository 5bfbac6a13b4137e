//! Probability that the disk `|z| < r` contains no eigenvalue.
//!
//! The moduli are independent across ranks, so the hole probability is the
//! product over `k` of `P{(R_k)² > r²}`.

use serde::{Deserialize, Serialize};

use crate::ensemble::{EnsembleParams, Size};
use crate::error::{check_positive, Error, Result};
use crate::logprob::LogProb;
use crate::sampler::{binomial_interval, count_radii};
use crate::special_fn::{ln_gamma_q_int, survival_asympt_log, survival_eval, MeijerGConfig};

/// Hard cap on the truncation rank of infinite products.
pub const MAX_TRUNCATION_RANK: usize = 1_000_000;

/// Smallest Monte Carlo sample accepted.
pub const MIN_MC_SAMPLES: usize = 100;

/// `ln` of the per-rank bound
/// `P{(R_k)² < r²} <= exp{(k - 1/2)(n + ln r² - n ln k) + n/6}`.
pub fn rank_cdf_bound_log(n: u32, r2: f64, k: usize) -> f64 {
    let (nf, kf) = (f64::from(n), k as f64);
    (kf - 0.5) * (nf + r2.ln() - nf * kf.ln()) + nf / 6.0
}

/// Truncation rank and certified tail for `Σ_{k>K} ln P{(R_k)² > r²}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Truncation {
    pub rank: usize,
    /// `2 Σ_{k>K} b_k`, an upper bound on `-Σ_{k>K} ln P{(R_k)² > r²}`.
    pub tail_bound: f64,
}

/// Smallest `K >= ⌈e r^{2/n}⌉` whose tail bound is below `tol`.
///
/// Beyond `K` every per-rank bound `b_k` is at most 1/2, so
/// `ln(1 - p_k) >= -2 p_k >= -2 b_k`.
pub fn truncation_rank(n: u32, r: f64, tol: f64) -> Result<Truncation> {
    if n == 0 {
        return Err(Error::Domain { what: "n", value: 0.0 });
    }
    check_positive("r", r)?;
    check_positive("tol", tol)?;
    let r2 = r * r;
    let rho = r2.powf(1.0 / f64::from(n));
    let start = (std::f64::consts::E * rho).ceil().max(1.0);
    if start > MAX_TRUNCATION_RANK as f64 {
        return Err(Error::TruncationCap {
            cap: MAX_TRUNCATION_RANK,
        });
    }
    let start = start as usize;
    // Past e·ρ the bounds decrease; collect them until they are negligible.
    let mut logs = Vec::new();
    let mut k = start + 1;
    loop {
        let lb = rank_cdf_bound_log(n, r2, k);
        logs.push(lb);
        if lb < -745.0 || (logs.len() > 1 && lb < logs[0] - 80.0 && lb < tol.ln() - 80.0) {
            break;
        }
        if k > MAX_TRUNCATION_RANK + 1 {
            return Err(Error::TruncationCap {
                cap: MAX_TRUNCATION_RANK,
            });
        }
        k += 1;
    }
    // suffix[i] = Σ_{j>=i} b_{start+1+j}
    let mut suffix = vec![0.0; logs.len() + 1];
    for i in (0..logs.len()).rev() {
        suffix[i] = suffix[i + 1] + logs[i].exp();
    }
    for (i, &lb) in logs.iter().enumerate() {
        // Candidate K = start + i: tail starts at index i.
        let tail = 2.0 * suffix[i];
        if lb <= -std::f64::consts::LN_2 && tail < tol {
            let rank = start + i;
            if rank > MAX_TRUNCATION_RANK {
                break;
            }
            return Ok(Truncation { rank, tail_bound: tail });
        }
    }
    Err(Error::TruncationCap {
        cap: MAX_TRUNCATION_RANK,
    })
}

/// `ln P{no eigenvalue in |z| < r}` with an absolute error estimate.
pub fn hole_exact_eval(params: EnsembleParams, r: f64, cfg: &MeijerGConfig) -> Result<(LogProb, f64)> {
    let size = params.finite_size()?;
    check_positive("r", r)?;
    let r2 = r * r;
    let mut total = 0.0;
    let mut err = 0.0;
    for k in 1..=size {
        let s = survival_eval(k as u32, params.n, r2, cfg)?;
        total += s.log_value.log_value();
        err += s.est_error;
    }
    Ok((LogProb::clamped(total), err))
}

/// `ln P{no eigenvalue in |z| < r}` for finite `N`, as `Σ_{k≤N} ln P{(R_k)² > r²}`.
pub fn hole_exact_log(params: EnsembleParams, r: f64, cfg: &MeijerGConfig) -> Result<LogProb> {
    hole_exact_eval(params, r, cfg).map(|(v, _)| v)
}

/// Leading large-`r` form of the finite-`N` hole probability:
///
/// ```text
/// ((n-1)N/2) ln 2π - (N/2) ln n - n Σ_{k≤N} ln Γ(k) - nN r^{2/n} + N(N - 1/n) ln r
/// ```
pub fn hole_asympt_log(params: EnsembleParams, r: f64) -> Result<f64> {
    let size = params.finite_size()?;
    check_positive("r", r)?;
    Ok((1..=size).map(|k| survival_asympt_log(k as u32, params.n, r)).sum())
}

/// Hole probability of the infinite ensemble.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InfiniteHole {
    /// Truncated sum minus the tail bound: a certified lower end.
    pub value: LogProb,
    /// Truncated sum `Σ_{k≤K}`: a certified upper end.
    pub truncated: LogProb,
    pub truncation_rank: usize,
    pub tail_bound: f64,
    /// Accumulated numerical error of the truncated sum.
    pub est_error: f64,
}

/// `ln ∏_{k≥1} P{(R_k)² > r²}` to within `tol`.
pub fn hole_infinite_log(n: u32, r: f64, tol: f64, cfg: &MeijerGConfig) -> Result<InfiniteHole> {
    let trunc = truncation_rank(n, r, tol)?;
    let params = EnsembleParams::finite(n, trunc.rank)?;
    let (sum, est_error) = hole_exact_eval(params, r, cfg)?;
    Ok(InfiniteHole {
        value: LogProb::clamped(sum.log_value() - trunc.tail_bound),
        truncated: sum,
        truncation_rank: trunc.rank,
        tail_bound: trunc.tail_bound,
        est_error,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HoleBounds {
    pub lower_log: f64,
    pub upper_log: f64,
}

/// Closed-form bounds on the infinite-ensemble hole probability, with
/// `ρ = r^{2/n}`:
///
/// * upper: `Σ_{k≤⌊ρ⌋} [-n(ρ-k) + (n/2) ln(k/ρ) - nk ln(k/ρ) + n/(12ρ)]`,
///   capped at 0;
/// * lower: `n Σ_{k≥1} ln Q(k, ρ)`, since `(R_k)²` dominates the `n`-th power
///   of a single Gamma(k, 1) variable in the survival order. The series is
///   truncated with the single-factor tail bound subtracted.
pub fn hole_bounds_infinite(n: u32, r: f64) -> Result<HoleBounds> {
    if n == 0 {
        return Err(Error::Domain { what: "n", value: 0.0 });
    }
    check_positive("r", r)?;
    let nf = f64::from(n);
    let rho = (r * r).powf(1.0 / nf);
    let mut upper = 0.0;
    let top = rho.floor() as usize;
    for k in 1..=top {
        let kf = k as f64;
        let l = (kf / rho).ln();
        upper += -nf * (rho - kf) + 0.5 * nf * l - nf * kf * l + nf / (12.0 * rho);
    }
    let trunc = truncation_rank(1, rho.sqrt(), 1e-15)?;
    let mut lower = 0.0;
    for k in 1..=trunc.rank {
        lower += ln_gamma_q_int(k as u64, rho);
    }
    lower -= trunc.tail_bound;
    Ok(HoleBounds {
        lower_log: nf * lower,
        upper_log: upper.min(0.0),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub estimate: f64,
    /// Half-width of the 99% binomial interval.
    pub halfwidth: f64,
    pub samples: usize,
    pub hits: u64,
}

/// Fraction of draws with every `(R_k)² > r²`, from [`crate::sampler::sample_radii`] streams.
pub fn hole_mc(params: EnsembleParams, r: f64, samples: usize, seed: u64) -> Result<McEstimate> {
    let size = params.finite_size()?;
    check_positive("r", r)?;
    if samples < MIN_MC_SAMPLES {
        return Err(Error::InvalidConfig(format!(
            "at least {MIN_MC_SAMPLES} Monte Carlo samples required, got {samples}"
        )));
    }
    let r2 = r * r;
    let hits = count_radii(params.n, size, samples, seed, |row| row.iter().all(|&x| x > r2))?;
    let (estimate, halfwidth) = binomial_interval(hits, samples as u64);
    Ok(McEstimate {
        estimate,
        halfwidth,
        samples,
        hits,
    })
}

/// Exact, asymptotic, bounding and Monte Carlo hole probabilities for one query.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HoleReport {
    pub params: EnsembleParams,
    pub r: f64,
    pub exact_log: LogProb,
    /// Absolute error estimate on `exact_log`, including any truncation tail.
    pub est_error: f64,
    pub asympt_log: Option<f64>,
    pub lower_log: Option<f64>,
    pub upper_log: Option<f64>,
    pub mc_estimate: Option<f64>,
    pub mc_halfwidth: Option<f64>,
    pub truncation_rank: Option<usize>,
}

/// Options for [`hole_report`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HoleOptions {
    /// Tail tolerance for infinite products.
    pub tol: f64,
    /// `(samples, seed)` for a Monte Carlo estimate; finite `N` only.
    pub mc: Option<(usize, u64)>,
}

impl Default for HoleOptions {
    fn default() -> Self {
        Self { tol: 1e-12, mc: None }
    }
}

pub fn hole_report(params: EnsembleParams, r: f64, opts: &HoleOptions, cfg: &MeijerGConfig) -> Result<HoleReport> {
    match params.size {
        Size::Finite(_) => {
            let (exact_log, est_error) = hole_exact_eval(params, r, cfg)?;
            let mc = opts.mc.map(|(s, seed)| hole_mc(params, r, s, seed)).transpose()?;
            Ok(HoleReport {
                params,
                r,
                exact_log,
                est_error,
                asympt_log: Some(hole_asympt_log(params, r)?),
                lower_log: None,
                upper_log: None,
                mc_estimate: mc.map(|m| m.estimate),
                mc_halfwidth: mc.map(|m| m.halfwidth),
                truncation_rank: None,
            })
        }
        Size::Infinite => {
            if opts.mc.is_some() {
                return Err(Error::InfiniteSize);
            }
            let inf = hole_infinite_log(params.n, r, opts.tol, cfg)?;
            let b = hole_bounds_infinite(params.n, r)?;
            Ok(HoleReport {
                params,
                r,
                exact_log: inf.value,
                est_error: inf.est_error + inf.tail_bound,
                asympt_log: None,
                lower_log: Some(b.lower_log),
                upper_log: Some(b.upper_log),
                mc_estimate: None,
                mc_halfwidth: None,
                truncation_rank: Some(inf.truncation_rank),
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_exponential_hole() {
        let cfg = MeijerGConfig::default();
        let p = EnsembleParams::finite(1, 1).unwrap();
        for &r in &[0.1, 1.0, 3.0] {
            assert!((hole_exact_log(p, r, &cfg).unwrap().log_value() + r * r).abs() < 1e-12 * (r * r));
            assert!((hole_asympt_log(p, r).unwrap() + r * r).abs() < 1e-12 * (r * r));
        }
    }

    #[test]
    fn truncation_tail_is_below_tol() {
        for n in 1..=3 {
            for &r in &[0.5, 2.0, 8.0] {
                let t = truncation_rank(n, r, 1e-12).unwrap();
                assert!(t.tail_bound < 1e-12);
                let rho = (r * r).powf(1.0 / f64::from(n));
                assert!(t.rank as f64 >= std::f64::consts::E * rho);
            }
        }
    }

    #[test]
    fn mc_requires_enough_samples() {
        let p = EnsembleParams::finite(1, 2).unwrap();
        assert!(matches!(hole_mc(p, 1.0, 10, 0), Err(Error::InvalidConfig(_))));
    }
}
