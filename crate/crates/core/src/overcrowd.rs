//! Probability that the disk `|z| < r` holds at least `m` eigenvalues of the
//! infinite ensemble.

use serde::{Deserialize, Serialize};

use crate::error::{check_positive, Error, Result};
use crate::hole::{hole_infinite_log, rank_cdf_bound_log, truncation_rank, McEstimate, MIN_MC_SAMPLES};
use crate::logprob::{log_add_exp, ln_1m_exp};
use crate::sampler::{binomial_interval, count_radii};
use crate::special_fn::MeijerGConfig;

/// Largest `m` accepted by [`overcrowd_mc`].
pub const MAX_MC_M: u32 = 6;

/// Tail truncation used for the Monte Carlo rank cutoff and the `m = 1` case.
const RANK_TOL: f64 = 1e-12;

fn check(n: u32, r: f64, m: u32) -> Result<()> {
    if n == 0 {
        return Err(Error::Domain { what: "n", value: 0.0 });
    }
    if m == 0 {
        return Err(Error::Domain { what: "m", value: 0.0 });
    }
    check_positive("r", r)
}

/// `Σ_{k≤m} nk ln(min(r^{2/n}/k, 1)/2)`.
///
/// Each factor bounds `P{(R_k)² < r²}` from below by requiring all `nk`
/// underlying unit exponentials to fall below `r^{2/n}/k`, and uses
/// `P{ξ < x} >= min(x, 1)/2`.
pub fn overcrowd_lower_log(n: u32, r: f64, m: u32) -> Result<f64> {
    check(n, r, m)?;
    let nf = f64::from(n);
    let rho = (r * r).powf(1.0 / nf);
    Ok((1..=m)
        .map(|k| {
            let kf = f64::from(k);
            nf * kf * ((rho / kf).min(1.0) * 0.5).ln()
        })
        .sum())
}

/// `ln Σ_{k>from} b_k` for the per-rank bounds `b_k`, summed until the terms,
/// past their peak, fall below `1e-30` of the running total.
fn tail_log(n: u32, r2: f64, from: usize) -> f64 {
    let rho = r2.powf(1.0 / f64::from(n));
    let peak = std::f64::consts::E * rho;
    let mut acc = f64::NEG_INFINITY;
    let mut k = from + 1;
    loop {
        let lb = rank_cdf_bound_log(n, r2, k);
        acc = log_add_exp(acc, lb);
        if (k as f64 > peak && lb < acc - 69.1) || lb < -1e4 {
            return acc;
        }
        k += 1;
    }
}

/// Sum of the `m` largest values of `min(ln b_k, 0)` over `k <= top`.
///
/// `ln b_k` is concave in `k`, so the largest values form a window around the
/// maximizer and can be collected by expanding outwards from it.
fn top_window_log(n: u32, r2: f64, m: usize, top: usize) -> f64 {
    let v = |k: usize| rank_cdf_bound_log(n, r2, k).min(0.0);
    let nf = f64::from(n);
    let rho = r2.powf(1.0 / nf);
    // d/dk ln b_k = n(ln(ρ/k) + 1/(2k)) vanishes just above ρ.
    let mut best = (rho.floor() as usize).clamp(1, top);
    for cand in [best.saturating_sub(1).max(1), (best + 1).min(top), (best + 2).min(top)] {
        if v(cand) > v(best) {
            best = cand;
        }
    }
    let (mut lo, mut hi) = (best, best);
    let mut total = v(best);
    for _ in 1..m {
        let left = if lo > 1 { v(lo - 1) } else { f64::NEG_INFINITY };
        let right = if hi < top { v(hi + 1) } else { f64::NEG_INFINITY };
        if left >= right {
            lo -= 1;
            total += left;
        } else {
            hi += 1;
            total += right;
        }
    }
    total
}

/// The union bound `ln[C(m², m) max_S ∏_{k∈S} b_k + Σ_{k>m²} b_k]` with
/// `C(m², m)` replaced by `m^{2m}`.
fn union_bound_log(n: u32, r2: f64, m: u32) -> f64 {
    let mu = m as usize;
    let top = mu * mu;
    let mf = f64::from(m);
    let head = 2.0 * mf * mf.ln() + top_window_log(n, r2, mu, top);
    log_add_exp(head, tail_log(n, r2, top))
}

/// Upper bound on `ln P{at least m eigenvalues in |z| < r}`.
///
/// At least `m` of the ranks `k <= m²` must fall inside the disk, or some
/// rank beyond `m²` must. The first event is bounded by a union over `m`-sets
/// using the per-rank bound `b_k = exp{(k - 1/2)(n + ln r² - n ln k) + n/6}`,
/// the second by `Σ_{k>m²} b_k`. For `m = 1` the exact complement of the
/// hole probability is used. The result is the running minimum over
/// `m' <= m` (the event shrinks with `m`), capped at 0.
pub fn overcrowd_upper_log(n: u32, r: f64, m: u32, cfg: &MeijerGConfig) -> Result<f64> {
    check(n, r, m)?;
    let r2 = r * r;
    let hole = hole_infinite_log(n, r, RANK_TOL, cfg)?;
    // `hole.value` is a certified lower end for the hole log-probability, so
    // its complement is an upper end for the overcrowding one.
    let mut best = ln_1m_exp(hole.value.log_value());
    for mm in 2..=m {
        best = best.min(union_bound_log(n, r2, mm));
    }
    Ok(best.min(0.0))
}

/// Fraction of draws where at least `m` of `(R_1)², …, (R_K)²` are below
/// `r²`, with `K` the hole-module truncation rank at `r`.
pub fn overcrowd_mc(n: u32, r: f64, m: u32, samples: usize, seed: u64) -> Result<McEstimate> {
    check(n, r, m)?;
    if m > MAX_MC_M {
        return Err(Error::TooLarge {
            what: "m",
            value: m as usize,
            max: MAX_MC_M as usize,
        });
    }
    if samples < MIN_MC_SAMPLES {
        return Err(Error::InvalidConfig(format!(
            "at least {MIN_MC_SAMPLES} Monte Carlo samples required, got {samples}"
        )));
    }
    let rank = truncation_rank(n, r, RANK_TOL)?.rank;
    let r2 = r * r;
    let need = m as usize;
    let hits = count_radii(n, rank, samples, seed, |row| {
        row.iter().filter(|&&x| x < r2).count() >= need
    })?;
    let (estimate, halfwidth) = binomial_interval(hits, samples as u64);
    Ok(McEstimate {
        estimate,
        halfwidth,
        samples,
        hits,
    })
}

/// `(Σ_{k≤m} k ln k, (m(m+1)/2) ln m - m²/4)`.
pub fn sum_k_log_k(m: u64) -> Result<(f64, f64)> {
    if m == 0 {
        return Err(Error::Domain { what: "m", value: 0.0 });
    }
    // Neumaier-compensated sum.
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for k in 2..=m {
        let kf = k as f64;
        let t = kf * kf.ln();
        let s = sum + t;
        if sum.abs() >= t.abs() {
            comp += (sum - s) + t;
        } else {
            comp += (t - s) + sum;
        }
        sum = s;
    }
    let mf = m as f64;
    Ok((sum + comp, 0.5 * mf * (mf + 1.0) * mf.ln() - 0.25 * mf * mf))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OvercrowdReport {
    pub n: u32,
    pub r: f64,
    pub m: u32,
    pub lower_log: f64,
    pub upper_log: f64,
    pub mc_estimate: Option<f64>,
    pub mc_halfwidth: Option<f64>,
    /// `(-upper_log, -lower_log) / ((1/2) n m² ln m)`; absent for `m = 1`.
    pub normalized: Option<(f64, f64)>,
}

pub fn overcrowd_report(
    n: u32,
    r: f64,
    m: u32,
    mc: Option<(usize, u64)>,
    cfg: &MeijerGConfig,
) -> Result<OvercrowdReport> {
    let lower_log = overcrowd_lower_log(n, r, m)?;
    let upper_log = overcrowd_upper_log(n, r, m, cfg)?;
    let mc = mc.map(|(s, seed)| overcrowd_mc(n, r, m, s, seed)).transpose()?;
    let normalized = (m >= 2).then(|| {
        let mf = f64::from(m);
        let scale = 0.5 * f64::from(n) * mf * mf * mf.ln();
        (-upper_log / scale, -lower_log / scale)
    });
    Ok(OvercrowdReport {
        n,
        r,
        m,
        lower_log,
        upper_log,
        mc_estimate: mc.map(|e| e.estimate),
        mc_halfwidth: mc.map(|e| e.halfwidth),
        normalized,
    })
}
