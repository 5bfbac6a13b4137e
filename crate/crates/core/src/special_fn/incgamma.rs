//! Regularized upper incomplete gamma `Q(k, x) = Γ(k, x)/Γ(k)` for integer `k`.

use super::gamma::ln_gamma;

/// `ln Q(k, x)` for integer shape `k >= 1` and `x >= 0`.
///
/// Uses the finite Poisson sum `Q(k, x) = e^{-x} Σ_{j<k} x^j / j!` when
/// `x >= k`, and `ln(1 - P(k, x))` with the convergent series for `P` below.
pub fn ln_gamma_q_int(k: u64, x: f64) -> f64 {
    assert!(k >= 1, "shape must be at least 1");
    if x.is_nan() || x < 0.0 {
        return f64::NAN;
    }
    if x == 0.0 {
        return 0.0;
    }
    if x.is_infinite() {
        return f64::NEG_INFINITY;
    }
    let kf = k as f64;
    if x >= kf {
        // Terms decrease from j = k-1 downwards; the ratio t_{j-1}/t_j = j/x.
        let lead = (kf - 1.0) * x.ln() - ln_gamma(kf) - x;
        let mut acc = 1.0;
        let mut term = 1.0;
        let mut j = k - 1;
        while j > 0 {
            term *= j as f64 / x;
            acc += term;
            if term < 1e-17 * acc {
                break;
            }
            j -= 1;
        }
        lead + acc.ln()
    } else {
        // P(k, x) = e^{-x} x^k / k! Σ_m x^m / ((k+1)…(k+m)).
        let lead = kf * x.ln() - ln_gamma(kf + 1.0) - x;
        let mut acc = 1.0;
        let mut term = 1.0;
        let mut m = 1.0;
        loop {
            term *= x / (kf + m);
            acc += term;
            if term < 1e-17 * acc {
                break;
            }
            m += 1.0;
        }
        let log_p = lead + acc.ln();
        crate::logprob::ln_1m_exp(log_p)
    }
}
