use std::fmt;
use std::str::FromStr;

use clap::ValueEnum;
use ginibre_core::{MeijerGConfig, Size};
use serde::{Deserialize, Serialize};

/// `start:stop:steps`, `steps` evenly spaced points including both ends.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
}

impl Grid {
    pub fn points(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.start];
        }
        let h = (self.stop - self.start) / (self.steps - 1) as f64;
        (0..self.steps)
            .map(|i| if i + 1 == self.steps { self.stop } else { self.start + h * i as f64 })
            .collect()
    }
}

impl FromStr for Grid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        let [a, b, n] = parts.as_slice() else {
            return Err(format!("expected start:stop:steps, got {s:?}"));
        };
        let start: f64 = a.parse().map_err(|_| format!("bad grid start {a:?}"))?;
        let stop: f64 = b.parse().map_err(|_| format!("bad grid stop {b:?}"))?;
        let steps: usize = n.parse().map_err(|_| format!("bad grid step count {n:?}"))?;
        if !(start.is_finite() && stop.is_finite()) {
            return Err("grid ends must be finite".into());
        }
        if steps == 0 {
            return Err("grid needs at least one step".into());
        }
        Ok(Self { start, stop, steps })
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.start, self.stop, self.steps)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Squared radii as products of Gamma variables.
    Radii,
    /// Squared eigenvalue moduli of explicit matrix products.
    Matrix,
}

/// Fully resolved inputs of one run; embedded in every report so the run can
/// be replayed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Params {
    pub n: u32,
    #[serde(rename = "N", default, skip_serializing_if = "Option::is_none")]
    pub size: Option<Size>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<u32>,
    /// Evaluation abscissae, already expanded from `--r`, `--r2` or `--grid`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub points: Vec<f64>,
    /// What `points` measure: `r`, `r2` or `x`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub axis: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mc_samples: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub draws: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub method: Option<Method>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_radii: Option<u32>,
    #[serde(default)]
    pub config: MeijerGConfig,
}

impl Params {
    pub fn new(n: u32) -> Self {
        Self {
            n,
            size: None,
            k: None,
            m: None,
            points: Vec::new(),
            axis: None,
            mc_samples: None,
            draws: None,
            seed: None,
            tol: None,
            method: None,
            n_radii: None,
            config: MeijerGConfig::default(),
        }
    }
}
