//! Meijer G-function families `G^{n,0}_{0,n}(t | 0,…,0)` and
//! `G^{n+1,0}_{1,n+1}(r² | 1; 0,k,…,k)` plus their gamma-function scaffolding.
//!
//! Two independent routes are provided for the core function: the residue
//! series (summed in MPFR at whatever precision its cancellation demands) and
//! trapezoidal quadrature of the Mellin–Barnes integral along a vertical line
//! placed at the saddle point of the integrand.

mod contour;
mod gamma;
mod incgamma;
mod residue;
mod survival;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use gamma::{digamma, log_gamma, trigamma, EULER_GAMMA};
pub use incgamma::ln_gamma_q_int;
pub use survival::{
    cdf_lower_log, survival_asympt_log, survival_eval, survival_log, SurvivalEval, SurvivalRoute,
};

pub(crate) use gamma::ln_gamma;

/// Quadrature and series controls for G-function evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeijerGConfig {
    /// Smallest abscissa allowed for the Mellin–Barnes contour. The contour
    /// sits at the integrand's saddle point when that lies further right.
    pub contour_offset: f64,
    /// Initial trapezoid step along the contour; halved until converged.
    pub quad_step: f64,
    /// Hard cap on the truncation height of the contour.
    pub quad_halfwidth: f64,
    /// Relative accuracy target for the contour quadrature.
    pub quad_tol: f64,
    /// Relative stopping tolerance for residue series.
    pub series_tol: f64,
    pub max_terms: usize,
}

impl Default for MeijerGConfig {
    fn default() -> Self {
        Self {
            contour_offset: 0.5,
            quad_step: 0.25,
            quad_halfwidth: 1e4,
            quad_tol: 1e-13,
            series_tol: 1e-17,
            max_terms: 20_000,
        }
    }
}

impl MeijerGConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidConfig(msg.to_owned()));
        if !(self.contour_offset > 0.0 && self.contour_offset.is_finite()) {
            return bad("contour_offset must be positive");
        }
        if !(self.quad_step > 0.0) {
            return bad("quad_step must be positive");
        }
        if !(self.quad_halfwidth > self.quad_step && self.quad_halfwidth.is_finite()) {
            return bad("quad_halfwidth must exceed quad_step");
        }
        if !(self.quad_tol > 0.0 && self.quad_tol < 1.0) {
            return bad("quad_tol must lie in (0, 1)");
        }
        if !(self.series_tol > 0.0 && self.series_tol < 1.0) {
            return bad("series_tol must lie in (0, 1)");
        }
        if self.max_terms == 0 {
            return bad("max_terms must be at least 1");
        }
        Ok(())
    }
}

/// Value of a positive G-function together with its log and error model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GEvalResult {
    /// May underflow to 0 where `log_value` is still meaningful.
    pub value: f64,
    pub log_value: f64,
    /// Absolute error estimate on `value`.
    pub est_error: f64,
    /// Series terms summed, or contour nodes evaluated.
    pub terms_used: usize,
}

impl GEvalResult {
    fn from_log(log_value: f64, rel_error: f64, terms_used: usize) -> Self {
        let value = log_value.exp();
        Self {
            value,
            log_value,
            est_error: rel_error * value,
            terms_used,
        }
    }
}

fn check_args(t: f64, n: u32, cfg: &MeijerGConfig) -> Result<()> {
    crate::error::check_positive("t", t)?;
    if n == 0 {
        return Err(Error::Domain { what: "n", value: 0.0 });
    }
    cfg.validate()
}

/// `G^{n,0}_{0,n}(t | 0,…,0)` as the sum of residues at the order-`n` poles
/// `s = 0, -1, -2, …`.
pub fn g_core_series(t: f64, n: u32, cfg: &MeijerGConfig) -> Result<GEvalResult> {
    check_args(t, n, cfg)?;
    let s = residue::residue_series(t, n, residue::SeriesKind::Density, cfg)?;
    Ok(GEvalResult::from_log(s.log_value, s.rel_error, s.terms))
}

/// `G^{n,0}_{0,n}(t | 0,…,0)` by quadrature of `(1/2πi) ∫ t^{-s} Γ(s)^n ds`.
pub fn g_core_mb(t: f64, n: u32, cfg: &MeijerGConfig) -> Result<GEvalResult> {
    check_args(t, n, cfg)?;
    let c = contour::g_core_contour(t, n, cfg)?;
    Ok(GEvalResult::from_log(c.log_value, c.rel_error, c.points))
}

/// `G^{n,0}_{0,n}(t | 0,…,0)` by the residue series, falling back to the
/// contour integral if the series cannot reach its precision target.
pub fn g_core(t: f64, n: u32, cfg: &MeijerGConfig) -> Result<GEvalResult> {
    match g_core_series(t, n, cfg) {
        Err(Error::Accuracy { .. } | Error::NonConvergence { .. }) => g_core_mb(t, n, cfg),
        other => other,
    }
}
