use serde::{Deserialize, Serialize};

/// Below this log-value the linear probability is reported as 0.
pub const UNDERFLOW_LOG: f64 = -700.0;

/// A probability carried as its natural logarithm.
///
/// Hole probabilities reach `exp(-1e4)` at modest radii, so every
/// probability-valued routine returns one of these instead of a bare `f64`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LogProb(f64);

impl LogProb {
    pub const ONE: LogProb = LogProb(0.0);
    pub const ZERO: LogProb = LogProb(f64::NEG_INFINITY);

    /// Wraps a log-probability. Values a hair above zero (rounding) are clamped.
    pub fn new(log_value: f64) -> Option<Self> {
        if log_value.is_nan() || log_value > 1e-12 {
            None
        } else {
            Some(LogProb(log_value.min(0.0)))
        }
    }

    pub(crate) fn clamped(log_value: f64) -> Self {
        debug_assert!(!log_value.is_nan());
        LogProb(log_value.min(0.0))
    }

    pub fn from_prob(p: f64) -> Option<Self> {
        if (0.0..=1.0).contains(&p) {
            Some(LogProb(p.ln()))
        } else {
            None
        }
    }

    #[inline]
    pub fn log_value(self) -> f64 {
        self.0
    }

    #[inline]
    pub fn prob(self) -> f64 {
        self.0.exp()
    }

    pub fn underflows(self) -> bool {
        self.0 < UNDERFLOW_LOG
    }

    /// `ln(1 - p)`, accurate for `p` near 0 and near 1.
    pub fn complement(self) -> LogProb {
        LogProb::clamped(ln_1m_exp(self.0))
    }
}

/// `ln(1 - e^x)` for `x <= 0`.
pub fn ln_1m_exp(x: f64) -> f64 {
    if x > -std::f64::consts::LN_2 {
        (-x.exp_m1()).ln()
    } else {
        (-x.exp()).ln_1p()
    }
}

/// `ln(e^a + e^b)`.
pub fn log_add_exp(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if hi == f64::NEG_INFINITY {
        return hi;
    }
    hi + (lo - hi).exp().ln_1p()
}
