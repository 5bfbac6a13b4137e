//! Survival function of a product of `n` independent Gamma(k, 1) variables,
//! `G^{n+1,0}_{1,n+1}(r² | 1; 0,k,…,k) / Γ(k)^n`.

use serde::{Deserialize, Serialize};

use super::contour::{cdf_contour, survival_contour};
use super::gamma::{ln_gamma, LN_SQRT_2PI};
use super::residue::{residue_series, SeriesKind};
use super::MeijerGConfig;
use crate::error::{Error, Result};
use crate::logprob::{ln_1m_exp, LogProb};

/// How a survival value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SurvivalRoute {
    /// `r2 = 0`.
    Trivial,
    /// Complement of the termwise-integrated residue series.
    CdfSeries,
    /// Contour integral of the survival function itself.
    Contour,
    /// Complement of the contour integral of the distribution function,
    /// used when the survival probability exceeds one half.
    ContourComplement,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurvivalEval {
    pub log_value: LogProb,
    /// Absolute error estimate on `log_value`.
    pub est_error: f64,
    pub route: SurvivalRoute,
}

fn check(k: u32, n: u32, cfg: &MeijerGConfig) -> Result<()> {
    if k == 0 {
        return Err(Error::Domain { what: "k", value: 0.0 });
    }
    if n == 0 {
        return Err(Error::Domain { what: "n", value: 0.0 });
    }
    cfg.validate()
}

/// `ln P{(R_k)² > r2}` with the route taken and an error estimate.
pub fn survival_eval(k: u32, n: u32, r2: f64, cfg: &MeijerGConfig) -> Result<SurvivalEval> {
    check(k, n, cfg)?;
    if !(r2 >= 0.0 && r2.is_finite()) {
        return Err(Error::Domain { what: "r2", value: r2 });
    }
    if r2 == 0.0 {
        return Ok(SurvivalEval {
            log_value: LogProb::ONE,
            est_error: 0.0,
            route: SurvivalRoute::Trivial,
        });
    }
    if r2.powf(1.0 / f64::from(n)) < 0.5 * f64::from(k) {
        if let Ok(cdf) = residue_series(r2, n, SeriesKind::Cdf { k }, cfg) {
            return Ok(from_cdf(cdf.log_value, cdf.rel_error, SurvivalRoute::CdfSeries));
        }
    }
    let direct = survival_contour(k, n, r2, cfg)?;
    if direct.log_value > -std::f64::consts::LN_2 {
        if let Ok(cdf) = cdf_contour(k, n, r2, cfg) {
            return Ok(from_cdf(cdf.log_value, cdf.rel_error, SurvivalRoute::ContourComplement));
        }
    }
    Ok(SurvivalEval {
        log_value: LogProb::clamped(direct.log_value),
        est_error: direct.rel_error,
        route: SurvivalRoute::Contour,
    })
}

fn from_cdf(log_cdf: f64, rel_error: f64, route: SurvivalRoute) -> SurvivalEval {
    let log_s = ln_1m_exp(log_cdf.min(0.0));
    // d ln S = -(F / S) dF/F
    let ratio = (log_cdf - log_s).exp();
    SurvivalEval {
        log_value: LogProb::clamped(log_s),
        est_error: ratio * rel_error,
        route,
    }
}

/// `ln P{(R_k)² > r2}` where `(R_k)²` is a product of `n` independent Gamma(k, 1)
/// variables.
pub fn survival_log(k: u32, n: u32, r2: f64, cfg: &MeijerGConfig) -> Result<LogProb> {
    survival_eval(k, n, r2, cfg).map(|e| e.log_value)
}

/// `ln P{(R_k)² < r2}` by termwise integration of the residue series.
///
/// Falls back to the contour integral left of the origin if the series
/// cannot reach its precision target.
pub fn cdf_lower_log(k: u32, n: u32, r2: f64, cfg: &MeijerGConfig) -> Result<LogProb> {
    check(k, n, cfg)?;
    crate::error::check_positive("r2", r2)?;
    let log_value = match residue_series(r2, n, SeriesKind::Cdf { k }, cfg) {
        Ok(s) => s.log_value,
        Err(Error::Accuracy { .. } | Error::NonConvergence { .. }) => cdf_contour(k, n, r2, cfg)?.log_value,
        Err(e) => return Err(e),
    };
    Ok(LogProb::clamped(log_value))
}

/// Leading large-`r` approximation to `ln P{(R_k)² > r²}`:
///
/// ```text
/// ((n-1)/2) ln 2π - (1/2) ln n - n r^{2/n} + (2k - 1 - 1/n) ln r - n ln Γ(k)
/// ```
///
/// Meaningful once `r^{2/n}` is well above `k`; the relative error in the
/// probability is `O(r^{-2/n})`.
pub fn survival_asympt_log(k: u32, n: u32, r: f64) -> f64 {
    let (kf, nf) = (f64::from(k), f64::from(n));
    (nf - 1.0) * LN_SQRT_2PI - 0.5 * nf.ln() - nf * r.powf(2.0 / nf) + (2.0 * kf - 1.0 - 1.0 / nf) * r.ln()
        - nf * ln_gamma(kf)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_survival() {
        let cfg = MeijerGConfig::default();
        assert!((survival_log(1, 1, 1.0, &cfg).unwrap().log_value() + 1.0).abs() < 1e-13);
        assert_eq!(survival_log(4, 3, 0.0, &cfg).unwrap(), LogProb::ONE);
    }

    #[test]
    fn routes_cover_both_sides_of_crossover() {
        let cfg = MeijerGConfig::default();
        assert_eq!(survival_eval(10, 1, 2.0, &cfg).unwrap().route, SurvivalRoute::CdfSeries);
        assert_eq!(survival_eval(2, 1, 30.0, &cfg).unwrap().route, SurvivalRoute::Contour);
        assert_eq!(survival_eval(10, 1, 6.0, &cfg).unwrap().route, SurvivalRoute::ContourComplement);
    }

    #[test]
    fn asymptotic_is_exact_for_exponential() {
        for &r in &[0.5, 2.0, 9.0] {
            assert!((survival_asympt_log(1, 1, r) + r * r).abs() < 1e-12 * r * r);
        }
    }

    #[test]
    fn rejects_bad_arguments() {
        let cfg = MeijerGConfig::default();
        assert!(survival_log(0, 1, 1.0, &cfg).is_err());
        assert!(survival_log(1, 0, 1.0, &cfg).is_err());
        assert!(survival_log(1, 1, -1.0, &cfg).is_err());
        assert!(cdf_lower_log(1, 1, 0.0, &cfg).is_err());
    }
}
