//! Weight, correlation kernel and joint densities of the product ensemble.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::special_fn::{g_core, ln_gamma, GEvalResult, MeijerGConfig};

const LN_PI: f64 = 1.144_729_885_849_400_2;

/// Largest `N` accepted by [`moduli_joint_density`].
pub const MAX_PERMANENT_SIZE: usize = 12;

/// Matrix size, possibly infinite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Size {
    Finite(usize),
    Infinite,
}

impl fmt::Display for Size {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Size::Finite(n) => write!(f, "{n}"),
            Size::Infinite => f.write_str("inf"),
        }
    }
}

impl FromStr for Size {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim() {
            "inf" | "infinite" | "Infinite" => Ok(Size::Infinite),
            other => match other.parse::<usize>() {
                Ok(0) => Err("N must be at least 1".into()),
                Ok(v) => Ok(Size::Finite(v)),
                Err(_) => Err(format!("expected a positive integer or \"inf\", got {other:?}")),
            },
        }
    }
}

impl Serialize for Size {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Size::Finite(n) => s.serialize_u64(*n as u64),
            Size::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Size {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(u64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Int(0) => Err(serde::de::Error::custom("N must be at least 1")),
            Raw::Int(v) => Ok(Size::Finite(v as usize)),
            Raw::Str(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// Number of factors `n` and matrix size `N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnsembleParams {
    pub n: u32,
    #[serde(rename = "N")]
    pub size: Size,
}

impl EnsembleParams {
    pub fn new(n: u32, size: Size) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain { what: "n", value: 0.0 });
        }
        if size == Size::Finite(0) {
            return Err(Error::Domain { what: "N", value: 0.0 });
        }
        Ok(Self { n, size })
    }

    pub fn finite(n: u32, size: usize) -> Result<Self> {
        Self::new(n, Size::Finite(size))
    }

    /// The matrix size, or [`Error::InfiniteSize`].
    pub fn finite_size(&self) -> Result<usize> {
        match self.size {
            Size::Finite(v) => Ok(v),
            Size::Infinite => Err(Error::InfiniteSize),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexPoint {
    pub re: f64,
    pub im: f64,
}

impl ComplexPoint {
    pub fn new(re: f64, im: f64) -> Self {
        Self { re, im }
    }

    pub fn norm_sqr(self) -> f64 {
        self.re * self.re + self.im * self.im
    }
}

impl From<ComplexPoint> for Complex64 {
    fn from(p: ComplexPoint) -> Self {
        Complex64::new(p.re, p.im)
    }
}

impl From<Complex64> for ComplexPoint {
    fn from(z: Complex64) -> Self {
        Self { re: z.re, im: z.im }
    }
}

/// `ln w_n(z)` with `w_n(z) = π^{n-1} G^{n,0}_{0,n}(|z|² | 0,…,0)`.
///
/// `+∞` at the origin for `n >= 2`, where the weight has a logarithmic pole.
pub fn log_weight_w_n(z: ComplexPoint, n: u32, cfg: &MeijerGConfig) -> Result<f64> {
    if n == 0 {
        return Err(Error::Domain { what: "n", value: 0.0 });
    }
    let t = z.norm_sqr();
    if !t.is_finite() {
        return Err(Error::Domain { what: "|z|^2", value: t });
    }
    if t == 0.0 {
        return Ok(if n == 1 { 0.0 } else { f64::INFINITY });
    }
    Ok(f64::from(n - 1) * LN_PI + g_core(t, n, cfg)?.log_value)
}

/// `w_n(z) = π^{n-1} G^{n,0}_{0,n}(|z|² | 0,…,0)`.
pub fn weight_w_n(z: ComplexPoint, n: u32, cfg: &MeijerGConfig) -> Result<f64> {
    log_weight_w_n(z, n, cfg).map(f64::exp)
}

/// `K_N(z, ξ) = Σ_{k<N} (z ξ̄)^k / (k!)^n`.
///
/// Terms are formed from their log-magnitude so large arguments do not
/// overflow before the factorials divide them down. The sum stops early once
/// the terms, past their peak, drop below `1e-16` of the accumulated
/// magnitude; for `N = ∞` that is the only stopping rule.
pub fn kernel(z: ComplexPoint, xi: ComplexPoint, params: EnsembleParams) -> Complex64 {
    let w = Complex64::from(z) * Complex64::from(xi).conj();
    let limit = match params.size {
        Size::Finite(v) => v,
        Size::Infinite => usize::MAX,
    };
    let modulus = w.norm();
    if modulus == 0.0 || limit == 1 {
        return Complex64::new(1.0, 0.0);
    }
    let (lw, arg) = (modulus.ln(), w.arg());
    let nf = f64::from(params.n);
    // Terms peak near k = |w|^{1/n}.
    let peak = modulus.powf(1.0 / nf);
    let mut acc = Complex64::new(1.0, 0.0);
    let mut mag = 1.0;
    let mut ln_fact = 0.0;
    let mut k = 1usize;
    while k < limit {
        let kf = k as f64;
        ln_fact += kf.ln();
        let size = (kf * lw - nf * ln_fact).exp();
        acc += Complex64::from_polar(size, kf * arg);
        mag += size;
        if kf > peak && size < 1e-16 * mag {
            break;
        }
        k += 1;
    }
    acc
}

/// `ln` of the joint eigenvalue density
/// `(π^N ∏_{k≤N} Γ(k))^{-n} ∏ w_n(z_k) ∏_{i<j} |z_i - z_j|²`.
///
/// This is a density on the region `|z_1| <= … <= |z_N|`; over all of `C^N`
/// the same expression integrates to `N!`. It also equals
/// `det[K_N(z_i, z_j)] ∏ π^{-n} w_n(z_k)`.
pub fn log_joint_density(points: &[ComplexPoint], n: u32, cfg: &MeijerGConfig) -> Result<f64> {
    if points.is_empty() {
        return Err(Error::EmptySample);
    }
    let size = points.len();
    let nf = f64::from(n);
    let norm: f64 = (1..=size).map(|k| ln_gamma(k as f64)).sum::<f64>() + size as f64 * LN_PI;
    let mut total = -nf * norm;
    for &p in points {
        total += log_weight_w_n(p, n, cfg)?;
    }
    for i in 0..size {
        for j in i + 1..size {
            let d = Complex64::from(points[i]) - Complex64::from(points[j]);
            total += d.norm_sqr().ln();
        }
    }
    Ok(total)
}

/// Permanent of a square matrix by Ryser's formula, visiting column subsets
/// in Gray-code order so each step updates the row sums by one column.
pub fn permanent(a: &[Vec<f64>]) -> f64 {
    let size = a.len();
    if size == 0 {
        return 1.0;
    }
    assert!(a.iter().all(|row| row.len() == size), "matrix must be square");
    assert!(size < 64);
    let mut row_sums = vec![0.0; size];
    let mut total = 0.0;
    let mut gray: u64 = 0;
    for step in 1u64..(1u64 << size) {
        let col = step.trailing_zeros() as usize;
        let bit = 1u64 << col;
        gray ^= bit;
        let sign = if gray & bit != 0 { 1.0 } else { -1.0 };
        for (s, row) in row_sums.iter_mut().zip(a) {
            *s += sign * row[col];
        }
        let prod: f64 = row_sums.iter().product();
        if (size - gray.count_ones() as usize) % 2 == 0 {
            total += prod;
        } else {
            total -= prod;
        }
    }
    total
}

/// Joint density of the eigenvalue moduli,
/// `(2π)^N (π^N ∏ Γ(k))^{-n} per[r_i^{2j-1}] ∏ w_n(r_j)`.
///
/// Like [`log_joint_density`], it is normalized on the ordered region
/// `r_1 <= … <= r_N`.
pub fn moduli_joint_density(radii: &[f64], n: u32, cfg: &MeijerGConfig) -> Result<f64> {
    let size = radii.len();
    if size == 0 {
        return Err(Error::EmptySample);
    }
    if size > MAX_PERMANENT_SIZE {
        return Err(Error::TooLarge {
            what: "N",
            value: size,
            max: MAX_PERMANENT_SIZE,
        });
    }
    for &r in radii {
        crate::error::check_positive("r", r)?;
    }
    let nf = f64::from(n);
    let norm: f64 = (1..=size).map(|k| ln_gamma(k as f64)).sum::<f64>() + size as f64 * LN_PI;
    let mut log_total = size as f64 * (2.0 * std::f64::consts::PI).ln() - nf * norm;

    // per[r_i^{2j-1}]: pull r_i out of row i and the column maximum out of
    // each column so the Ryser sums stay O(1).
    let mut m: Vec<Vec<f64>> = radii
        .iter()
        .map(|&r| (0..size).map(|j| r.powi(2 * j as i32)).collect())
        .collect();
    for j in 0..size {
        let cmax = m.iter().map(|row| row[j]).fold(0.0, f64::max);
        log_total += cmax.ln();
        for row in m.iter_mut() {
            row[j] /= cmax;
        }
    }
    let per = permanent(&m);
    if !(per > 0.0) {
        return Ok(0.0);
    }
    log_total += per.ln();
    for &r in radii {
        log_total += r.ln() + log_weight_w_n(ComplexPoint::new(r, 0.0), n, cfg)?;
    }
    Ok(log_total.exp())
}

/// `ρ_k(x) = x^{k-1} G^{n,0}_{0,n}(x | 0,…,0) / Γ(k)^n`, the density of a
/// product of `n` independent Gamma(k, 1) variables, with its log and an
/// absolute error estimate.
pub fn radial_density_eval(k: u32, n: u32, x: f64, cfg: &MeijerGConfig) -> Result<GEvalResult> {
    if k == 0 {
        return Err(Error::Domain { what: "k", value: 0.0 });
    }
    crate::error::check_positive("x", x)?;
    let kf = f64::from(k);
    let g = g_core(x, n, cfg)?;
    let log_value = (kf - 1.0) * x.ln() + g.log_value - f64::from(n) * ln_gamma(kf);
    let value = log_value.exp();
    // Where `g` underflows the density does too, and so does its error.
    let rel = if g.value > 0.0 { g.est_error / g.value } else { 0.0 };
    Ok(GEvalResult {
        value,
        log_value,
        est_error: rel * value,
        terms_used: g.terms_used,
    })
}

/// `ln ρ_k(x)`; see [`radial_density_eval`].
pub fn radial_log_density(k: u32, n: u32, x: f64, cfg: &MeijerGConfig) -> Result<f64> {
    radial_density_eval(k, n, x, cfg).map(|g| g.log_value)
}

/// Density of `(R_k)²`; see [`radial_density_eval`].
pub fn radial_density(k: u32, n: u32, x: f64, cfg: &MeijerGConfig) -> Result<f64> {
    radial_log_density(k, n, x, cfg).map(f64::exp)
}
