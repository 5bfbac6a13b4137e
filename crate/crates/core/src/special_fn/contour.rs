//! Vertical-line Mellin–Barnes integrals `(1/2πi) ∫_{c-i∞}^{c+i∞} F(s) ds`.
//!
//! Every integrand here satisfies `F(conj s) = conj F(s)`, so the integral is
//! `(1/π) ∫_0^∞ Re F(c + iy) dy`. The line is placed at the real saddle of
//! `ln F`, where the integrand is locally Gaussian and non-oscillating, and
//! `F(c)` is factored out so the quadrature works with `O(1)` numbers.

use num_complex::Complex64;

use super::gamma::{ln_gamma, ln_gamma_complex, psi, trigamma};
use super::MeijerGConfig;
use crate::error::{Error, Result};

const MAX_HALVINGS: usize = 12;

#[derive(Debug, Clone, Copy)]
pub(crate) struct LineIntegral {
    pub log_value: f64,
    pub rel_error: f64,
    pub points: usize,
    /// Real part of the integration line.
    #[cfg_attr(not(test), allow(dead_code))]
    pub abscissa: f64,
}

/// `G^{n,0}_{0,n}(t | 0,…,0)` from `F(s) = t^{-s} Γ(s)^n`.
pub(crate) fn g_core_contour(t: f64, n: u32, cfg: &MeijerGConfig) -> Result<LineIntegral> {
    let nf = f64::from(n);
    let lt = t.ln();
    let a = lt / nf;
    // ψ(c) = ln t / n; ψ is increasing and ψ(e^a + 1) > a.
    let c = if psi(cfg.contour_offset) >= a {
        cfg.contour_offset
    } else {
        solve_increasing(|x| psi(x) - a, trigamma, cfg.contour_offset, a.exp() + 1.0)
    };
    let sigma = 1.0 / (nf * trigamma(c)).sqrt();
    let log_f = |s: Complex64| -s * lt + ln_gamma_complex(s) * nf;
    integrate_line(log_f, c, sigma, cfg)
}

/// `ln P{X > r2}` for `X` a product of `n` independent Gamma(k, 1) variables,
/// from `F(s) = r2^{-s} Γ(k+s)^n / (s Γ(k)^n)` on a line with `c > 0`.
pub(crate) fn survival_contour(k: u32, n: u32, r2: f64, cfg: &MeijerGConfig) -> Result<LineIntegral> {
    let (kf, nf) = (f64::from(k), f64::from(n));
    let lr = r2.ln();
    let slope = |c: f64| nf * psi(kf + c) - 1.0 / c - lr;
    let curve = |c: f64| nf * trigamma(kf + c) + 1.0 / (c * c);
    let c = if slope(cfg.contour_offset) >= 0.0 {
        cfg.contour_offset
    } else {
        // nψ(k+c) - 1/c > n ln(c) - 1 once c >= 1, so e^{(ln r2 + 1)/n} + 1 brackets.
        let hi = ((lr + 1.0) / nf).exp() + 1.0;
        solve_increasing(slope, curve, cfg.contour_offset, hi.max(2.0 * cfg.contour_offset))
    };
    let sigma = 1.0 / curve(c).sqrt();
    let log_f = |s: Complex64| -s * lr + ln_gamma_complex(s + kf) * nf - s.ln();
    let mut out = integrate_line(log_f, c, sigma, cfg)?;
    out.log_value -= nf * ln_gamma(kf);
    Ok(out)
}

/// `ln P{X < r2}` for the same product, from `F(s) = r2^{-s} Γ(k+s)^n / (-s Γ(k)^n)`
/// on a line with `-k < c < 0`. Moving the line across the pole at `s = 0`
/// subtracts its residue `Γ(k)^n` from the survival integral.
pub(crate) fn cdf_contour(k: u32, n: u32, r2: f64, cfg: &MeijerGConfig) -> Result<LineIntegral> {
    let (kf, nf) = (f64::from(k), f64::from(n));
    let lr = r2.ln();
    let slope = |c: f64| nf * psi(kf + c) - 1.0 / c - lr;
    let curve = |c: f64| nf * trigamma(kf + c) + 1.0 / (c * c);
    let c = solve_increasing(slope, curve, -kf * (1.0 - 1e-9), -kf * 1e-9);
    let sigma = 1.0 / curve(c).sqrt();
    let log_f = |s: Complex64| -s * lr + ln_gamma_complex(s + kf) * nf - (-s).ln();
    let mut out = integrate_line(log_f, c, sigma, cfg)?;
    out.log_value -= nf * ln_gamma(kf);
    Ok(out)
}

/// Root of an increasing function on `[lo, hi]` by Newton steps, falling back
/// to bisection whenever a step leaves the current bracket. Returns the
/// nearer endpoint if the bracket does not straddle a sign change.
fn solve_increasing(f: impl Fn(f64) -> f64, df: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    if f(lo) >= 0.0 {
        return lo;
    }
    if f(hi) <= 0.0 {
        return hi;
    }
    let mut x = 0.5 * (lo + hi);
    for _ in 0..200 {
        let fx = f(x);
        if fx == 0.0 {
            return x;
        }
        if fx < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let step = fx / df(x);
        let mut next = x - step;
        if !(next > lo && next < hi) || !next.is_finite() {
            next = 0.5 * (lo + hi);
        }
        if (next - x).abs() <= 4.0 * f64::EPSILON * x.abs().max(1e-300) || hi - lo <= 4.0 * f64::EPSILON * hi.abs() {
            return next;
        }
        x = next;
    }
    x
}

/// `(1/π) ∫_0^∞ Re F(c + iy) dy` by the trapezoid rule with step halving.
fn integrate_line(
    log_f: impl Fn(Complex64) -> Complex64,
    c: f64,
    sigma: f64,
    cfg: &MeijerGConfig,
) -> Result<LineIntegral> {
    let base = log_f(Complex64::new(c, 0.0)).re;
    let eval = |y: f64| -> Complex64 {
        let v = log_f(Complex64::new(c, y));
        Complex64::new(v.re - base, v.im)
    };
    let mut h = cfg.quad_step * sigma.max(1.0);
    let mut points = 1usize;

    // March outwards at the coarse step until the tail bound is negligible.
    let mut sum = 0.5; // f(0) = 1 after normalization
    let mut abs_sum = 0.5;
    let mut prev_g = 0.0f64;
    let mut y = 0.0;
    let tail = loop {
        y += h;
        if y > cfg.quad_halfwidth {
            return Err(Error::Accuracy {
                est_error: prev_g.exp(),
                tol: cfg.quad_tol,
            });
        }
        let v = eval(y);
        points += 1;
        let term = v.re.exp() * v.im.cos();
        sum += term;
        abs_sum += term.abs();
        let rate = (prev_g - v.re) / h;
        prev_g = v.re;
        if rate > 0.0 {
            // The log-modulus is concave in y beyond the saddle region, so
            // the secant slope bounds the remaining decay rate from below.
            let tail = v.re.exp() / rate;
            if tail <= 1e-3 * cfg.quad_tol * (sum * h).abs() {
                break tail;
            }
        }
    };
    let top = y;
    let mut estimate = sum * h;

    for _ in 0..MAX_HALVINGS {
        let half = 0.5 * h;
        let mut yy = half;
        let mut mid = 0.0;
        let mut mid_abs = 0.0;
        while yy < top {
            let v = eval(yy);
            let term = v.re.exp() * v.im.cos();
            mid += term;
            mid_abs += term.abs();
            points += 1;
            yy += h;
        }
        sum += mid;
        abs_sum += mid_abs;
        h = half;
        let refined = sum * h;
        let diff = (refined - estimate).abs();
        estimate = refined;
        if diff <= cfg.quad_tol * refined.abs() {
            if !(refined > 0.0) {
                break;
            }
            let rounding = abs_sum * h * (points as f64) * f64::EPSILON / refined;
            return Ok(LineIntegral {
                log_value: base + (refined / std::f64::consts::PI).ln(),
                rel_error: (diff + tail) / refined + rounding,
                points,
                abscissa: c,
            });
        }
    }
    Err(Error::Accuracy {
        est_error: if estimate != 0.0 { f64::INFINITY } else { 1.0 },
        tol: cfg.quad_tol,
    })
}
