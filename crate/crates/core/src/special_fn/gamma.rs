//! Log-gamma and polygamma functions in double precision.
//!
//! The real `ln Γ` combines a Taylor series about 1 and 2 (coefficients
//! `ζ(k) - 1`, so no cancellation at the zeros of `ln Γ`) with downward
//! recurrence below 10 and the Stirling series above it.

use num_complex::Complex64;

use crate::error::{Error, Result};

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
pub(crate) const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// `ζ(k) - 1` for `k = 2, 3, ...`.
const ZETA_MINUS_ONE: [f64; 30] = [
    6.449_340_668_482_264e-1,
    2.020_569_031_595_942_9e-1,
    8.232_323_371_113_819e-2,
    3.692_775_514_336_993e-2,
    1.734_306_198_444_914e-2,
    8.349_277_381_922_827e-3,
    4.077_356_197_944_34e-3,
    2.008_392_826_082_214_3e-3,
    9.945_751_278_180_853e-4,
    4.941_886_041_194_645e-4,
    2.460_865_533_080_483e-4,
    1.227_133_475_784_891_5e-4,
    6.124_813_505_870_483e-5,
    3.058_823_630_702_049_3e-5,
    1.528_225_940_865_187e-5,
    7.637_197_637_899_763e-6,
    3.817_293_264_999_84e-6,
    1.908_212_716_553_939e-6,
    9.539_620_338_727_962e-7,
    4.769_329_867_878_064_5e-7,
    2.384_505_027_277_33e-7,
    1.192_199_259_653_110_6e-7,
    5.960_818_905_125_948e-8,
    2.980_350_351_465_228e-8,
    1.490_155_482_836_504_3e-8,
    7.450_711_789_835_43e-9,
    3.725_334_024_788_457e-9,
    1.862_659_723_513_049e-9,
    9.313_274_324_196_682e-10,
    4.656_629_065_033_784e-10,
];

/// Stirling coefficients `B_{2k} / (2k (2k-1))`.
const STIRLING: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
];

/// `ln Γ(2 + z) - z(1 - γ)` contribution, `|z| <= 1/2`.
fn ln_gamma_2p_tail(z: f64) -> f64 {
    // Σ_{k>=2} (-1)^k (ζ(k)-1) z^k / k, summed from the small end.
    let mut acc = 0.0;
    for (i, &c) in ZETA_MINUS_ONE.iter().enumerate().rev() {
        let k = (i + 2) as f64;
        let sign = if (i + 2) % 2 == 0 { 1.0 } else { -1.0 };
        acc = acc * z + sign * c / k;
    }
    acc * z * z
}

/// `ln Γ(2 + z)` for `|z| <= 1/2`.
fn ln_gamma_2p(z: f64) -> f64 {
    z * (1.0 - EULER_GAMMA) + ln_gamma_2p_tail(z)
}

fn ln_gamma_stirling(x: f64) -> f64 {
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let mut series = 0.0;
    for &c in STIRLING.iter().rev() {
        series = series * inv2 + c;
    }
    (x - 0.5) * x.ln() - x + LN_SQRT_2PI + series * inv
}

/// `ln Γ(x)` for `x > 0`; NaN outside the domain.
pub(crate) fn ln_gamma(x: f64) -> f64 {
    if !(x > 0.0) {
        return f64::NAN;
    }
    if x >= 10.0 {
        return ln_gamma_stirling(x);
    }
    if x < 0.5 {
        // ln Γ(x) = ln Γ(1 + x) - ln x, with ln Γ(1+x) = ln Γ(2+x) - ln(1+x).
        return ln_gamma_2p(x) - x.ln_1p() - x.ln();
    }
    if x <= 1.5 {
        let z = x - 1.0;
        return ln_gamma_2p(z) - z.ln_1p();
    }
    if x <= 2.5 {
        return ln_gamma_2p(x - 2.0);
    }
    let mut y = x;
    let mut prod = 1.0;
    while y > 2.5 {
        y -= 1.0;
        prod *= y;
    }
    prod.ln() + ln_gamma_2p(y - 2.0)
}

/// Natural log of the gamma function.
pub fn log_gamma(x: f64) -> Result<f64> {
    if x > 0.0 {
        Ok(ln_gamma(x))
    } else {
        Err(Error::Domain { what: "x", value: x })
    }
}

pub(crate) fn psi(x: f64) -> f64 {
    if !(x > 0.0) {
        return f64::NAN;
    }
    let mut acc = 0.0;
    let mut y = x;
    while y < 10.0 {
        acc -= 1.0 / y;
        y += 1.0;
    }
    let inv2 = 1.0 / (y * y);
    let tail = inv2
        * (1.0 / 12.0
            - inv2
                * (1.0 / 120.0
                    - inv2
                        * (1.0 / 252.0
                            - inv2 * (1.0 / 240.0 - inv2 * (1.0 / 132.0 - inv2 * (691.0 / 32760.0 - inv2 / 12.0))))));
    acc + y.ln() - 0.5 / y - tail
}

/// The digamma function `ψ(x) = Γ'(x)/Γ(x)`.
pub fn digamma(x: f64) -> Result<f64> {
    if x > 0.0 {
        Ok(psi(x))
    } else {
        Err(Error::Domain { what: "x", value: x })
    }
}

/// `ψ'(x)` for `x > 0`.
pub fn trigamma(x: f64) -> f64 {
    if !(x > 0.0) {
        return f64::NAN;
    }
    let mut acc = 0.0;
    let mut y = x;
    while y < 10.0 {
        acc += 1.0 / (y * y);
        y += 1.0;
    }
    let inv = 1.0 / y;
    let inv2 = inv * inv;
    let tail = inv
        + 0.5 * inv2
        + inv2 * inv
            * (1.0 / 6.0 - inv2 * (1.0 / 30.0 - inv2 * (1.0 / 42.0 - inv2 * (1.0 / 30.0 - inv2 * 5.0 / 66.0))));
    acc + tail
}

/// Principal-sheet-agnostic `ln Γ(z)` for `Re z > 0`.
///
/// The imaginary part may differ from the principal branch by a multiple of
/// `2π`; callers only exponentiate it.
pub(crate) fn ln_gamma_complex(z: Complex64) -> Complex64 {
    debug_assert!(z.re > 0.0);
    let mut w = z;
    let mut shift = Complex64::new(0.0, 0.0);
    while w.re < 10.0 {
        shift += w.ln();
        w += 1.0;
    }
    let inv = w.inv();
    let inv2 = inv * inv;
    let mut series = Complex64::new(0.0, 0.0);
    for &c in STIRLING.iter().rev() {
        series = series * inv2 + c;
    }
    (w - 0.5) * w.ln() - w + LN_SQRT_2PI + series * inv - shift
}
