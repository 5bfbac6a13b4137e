use ginibre_core::ensemble::radial_density_eval;
use ginibre_core::hole::{hole_report, HoleOptions};
use ginibre_core::overcrowd::overcrowd_report;
use ginibre_core::sampler::sample_radii;
use ginibre_core::special_fn::survival_eval;
use ginibre_core::validate::{eigen_moduli_sq_batch, validate_radii_vs_matrix};
use ginibre_core::{EnsembleParams, Error, Size};

use crate::params::{Method, Params};
use crate::report::{ErrorEntry, Report, Row};

/// p-value at or below which a validation run counts as failed.
pub const KS_THRESHOLD: f64 = 1e-3;

pub const EXIT_OK: u8 = 0;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_ACCURACY: u8 = 3;
pub const EXIT_STATISTICAL: u8 = 4;

#[derive(Debug, Clone, PartialEq)]
pub struct UsageError {
    pub flag: Option<String>,
    pub message: String,
}

impl UsageError {
    pub fn new(flag: &str, message: impl Into<String>) -> Self {
        Self {
            flag: Some(flag.to_owned()),
            message: message.into(),
        }
    }
}

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match &self.flag {
            Some(flag) => write!(f, "invalid value for '{flag}': {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

fn flag_for(what: &str) -> Option<&'static str> {
    Some(match what {
        "n" => "--n",
        "N" => "--N",
        "k" => "--k",
        "m" => "--m",
        "r" => "--r",
        "r2" => "--r2",
        "x" | "t" => "--r2",
        "tol" => "--tol",
        _ => return None,
    })
}

/// Errors that are the caller's fault end the run; numerical ones are
/// reported per point and the run continues.
fn classify(e: Error, point: Option<f64>, errors: &mut Vec<ErrorEntry>) -> Result<(), UsageError> {
    match e {
        Error::Domain { what, .. } => Err(UsageError {
            flag: flag_for(what).map(str::to_owned),
            message: e.to_string(),
        }),
        Error::TooLarge { what, .. } => Err(UsageError {
            flag: flag_for(what).map(str::to_owned),
            message: e.to_string(),
        }),
        Error::InfiniteSize => Err(UsageError::new("--N", e.to_string())),
        Error::InvalidConfig(_) | Error::EmptySample => Err(UsageError {
            flag: None,
            message: e.to_string(),
        }),
        Error::Accuracy { est_error, .. } => {
            errors.push(ErrorEntry {
                kind: "accuracy",
                flag: None,
                point,
                message: e.to_string(),
                est_error: Some(est_error),
            });
            Ok(())
        }
        Error::NonConvergence { .. } | Error::TruncationCap { .. } | Error::EigenFailure { .. } => {
            errors.push(ErrorEntry {
                kind: "accuracy",
                flag: None,
                point,
                message: e.to_string(),
                est_error: None,
            });
            Ok(())
        }
    }
}

fn require<T: Copy>(v: Option<T>, flag: &str) -> Result<T, UsageError> {
    v.ok_or_else(|| UsageError::new(flag, "required for this command"))
}

fn require_points(p: &Params, flag: &str) -> Result<(), UsageError> {
    if p.points.is_empty() {
        Err(UsageError::new(flag, "required for this command (or give --grid)"))
    } else {
        Ok(())
    }
}

fn ensemble(p: &Params) -> Result<EnsembleParams, UsageError> {
    let size = require(p.size, "--N")?;
    EnsembleParams::new(p.n, size).map_err(|e| UsageError::new("--n", e.to_string()))
}

fn finite_ensemble(p: &Params) -> Result<EnsembleParams, UsageError> {
    let e = ensemble(p)?;
    if e.size == Size::Infinite {
        return Err(UsageError::new("--N", "a finite matrix size is required"));
    }
    Ok(e)
}

/// Runs `command` with fully resolved parameters.
pub fn execute(command: &str, params: &Params) -> Result<(Report, u8), UsageError> {
    let cfg = params.config;
    cfg.validate().map_err(|e| UsageError {
        flag: None,
        message: e.to_string(),
    })?;
    let mut rows = Vec::new();
    let mut errors = Vec::new();
    let mut statistical_failure = false;

    match command {
        "density" => {
            require_points(params, "--r2")?;
            let k = params.k.unwrap_or(1);
            for &x in &params.points {
                match radial_density_eval(k, params.n, x, &cfg) {
                    Ok(g) => {
                        let mut row = Row::default();
                        row.push("x", x).push("k", u64::from(k)).push("n", u64::from(params.n));
                        row.prob("density", g.log_value).push("est_error", g.est_error);
                        rows.push(row);
                    }
                    Err(e) => classify(e, Some(x), &mut errors)?,
                }
            }
        }
        "survival" => {
            require_points(params, "--r")?;
            let k = params.k.unwrap_or(1);
            for &r2 in &params.points {
                match survival_eval(k, params.n, r2, &cfg) {
                    Ok(s) => {
                        let route = serde_json::to_value(s.route).expect("route serializes");
                        let mut row = Row::default();
                        row.push("r2", r2).push("k", u64::from(k)).push("n", u64::from(params.n));
                        row.prob("survival", s.log_value.log_value())
                            .push("est_error", s.est_error)
                            .push("route", route.as_str().unwrap_or_default());
                        rows.push(row);
                    }
                    Err(e) => classify(e, Some(r2), &mut errors)?,
                }
            }
        }
        "hole" => {
            require_points(params, "--r")?;
            let ens = ensemble(params)?;
            let mc = params.mc_samples.map(|s| (s, params.seed.unwrap_or(0)));
            let opts = HoleOptions {
                tol: params.tol.unwrap_or(HoleOptions::default().tol),
                mc,
            };
            for &r in &params.points {
                match hole_report(ens, r, &opts, &cfg) {
                    Ok(h) => {
                        let mut row = Row::default();
                        row.push("r", r);
                        row.prob("exact", h.exact_log.log_value())
                            .push("est_error", h.est_error)
                            .push("asympt_log", h.asympt_log)
                            .push("lower_log", h.lower_log)
                            .push("upper_log", h.upper_log)
                            .push("mc_estimate", h.mc_estimate)
                            .push("mc_halfwidth", h.mc_halfwidth)
                            .push("truncation_rank", h.truncation_rank);
                        rows.push(row);
                    }
                    Err(e) => classify(e, Some(r), &mut errors)?,
                }
            }
        }
        "overcrowd" => {
            require_points(params, "--r")?;
            let m = require(params.m, "--m")?;
            let mc = params.mc_samples.map(|s| (s, params.seed.unwrap_or(0)));
            for &r in &params.points {
                match overcrowd_report(params.n, r, m, mc, &cfg) {
                    Ok(o) => {
                        let mut row = Row::default();
                        row.push("r", r).push("m", u64::from(m));
                        row.prob("lower", o.lower_log)
                            .prob("upper", o.upper_log)
                            .push("mc_estimate", o.mc_estimate)
                            .push("mc_halfwidth", o.mc_halfwidth)
                            .push("normalized_upper", o.normalized.map(|v| v.0))
                            .push("normalized_lower", o.normalized.map(|v| v.1));
                        rows.push(row);
                    }
                    Err(e) => classify(e, Some(r), &mut errors)?,
                }
            }
        }
        "sample" => {
            let ens = finite_ensemble(params)?;
            let draws = params.draws.unwrap_or(1);
            if draws == 0 {
                return Err(UsageError::new("--draws", "must be at least 1"));
            }
            let seed = params.seed.unwrap_or(0);
            let batch = match params.method.unwrap_or(Method::Radii) {
                Method::Radii => sample_radii(ens, draws, seed).map(|s| s.batch),
                Method::Matrix => eigen_moduli_sq_batch(ens, draws, seed),
            };
            match batch {
                Ok(batch) => {
                    for (d, draw) in batch.iter().enumerate() {
                        let mut row = Row::default();
                        row.push("draw", d);
                        for (i, &v) in draw.iter().enumerate() {
                            row.push(&format!("r2_{}", i + 1), v);
                        }
                        rows.push(row);
                    }
                }
                Err(e) => classify(e, None, &mut errors)?,
            }
        }
        "validate theorem1" => {
            let ens = finite_ensemble(params)?;
            let size = ens.finite_size().expect("finite");
            let draws = params.draws.unwrap_or(2000);
            let seed = params.seed.unwrap_or(0);
            let n_radii = params.n_radii.unwrap_or(params.n);
            match validate_radii_vs_matrix(params.n, n_radii, size, draws, seed) {
                Ok(ks) => {
                    let passed = ks.p_value > KS_THRESHOLD;
                    let mut row = Row::default();
                    row.push("statistic", ks.statistic)
                        .push("p_value", ks.p_value)
                        .push("size_matrix", ks.sizes.0)
                        .push("size_radii", ks.sizes.1)
                        .push("passed", passed);
                    rows.push(row);
                    if !passed {
                        statistical_failure = true;
                        errors.push(ErrorEntry {
                            kind: "statistical",
                            flag: None,
                            point: None,
                            message: format!("KS p-value {:e} at or below {KS_THRESHOLD:e}", ks.p_value),
                            est_error: None,
                        });
                    }
                }
                Err(Error::TooLarge { what: "N", .. }) => {
                    return Err(UsageError::new("--N", "validation supports N <= 16"));
                }
                Err(Error::InvalidConfig(msg)) => return Err(UsageError::new("--draws", msg)),
                Err(e) => classify(e, None, &mut errors)?,
            }
        }
        other => {
            return Err(UsageError {
                flag: None,
                message: format!("unknown command {other:?}"),
            })
        }
    }

    let code = if errors.iter().any(|e| e.kind == "accuracy") {
        EXIT_ACCURACY
    } else if statistical_failure {
        EXIT_STATISTICAL
    } else {
        EXIT_OK
    };
    let report = Report {
        command: command.to_owned(),
        params: params.clone(),
        rows,
        errors,
    };
    Ok((report, code))
}
