mod common;

use common::rel_err;
use ginibre_core::ensemble::{
    kernel, log_joint_density, moduli_joint_density, permanent, radial_density, weight_w_n,
};
use ginibre_core::quad::integrate;
use ginibre_core::sampler::{eigen_moduli, sample_product_matrix, substream};
use ginibre_core::special_fn::survival_log;
use ginibre_core::{ComplexPoint, EnsembleParams, Error, MeijerGConfig, Size};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::Rng;
use std::f64::consts::PI;

fn cfg() -> MeijerGConfig {
    MeijerGConfig::default()
}

#[test]
fn weight_n1_is_gaussian() {
    let w = weight_w_n(ComplexPoint::new(0.6, 0.8), 1, &cfg()).unwrap();
    assert!(rel_err(w, (-1.0f64).exp()) < 1e-14);
}

#[test]
fn weight_normalization() {
    // ∫_C π^{-n} w_n dm = ∫_0^∞ π^{1-n} w_n(√x) dx, taken in u = ln x.
    let c = cfg();
    for n in 1..=3u32 {
        let f = |u: f64| {
            let x = u.exp();
            x * weight_w_n(ComplexPoint::new(x.sqrt(), 0.0), n, &c).unwrap() * PI.powi(1 - n as i32)
        };
        let top = (80.0 / f64::from(n)).powi(n as i32);
        let v = integrate(f, -60.0, top.ln(), 1e-15, 1e-11, 400).value;
        assert!((v - 1.0).abs() < 1e-6, "n={n}: {v}");
    }
}

#[test]
fn kernel_basics() {
    let p = EnsembleParams::new(2, Size::Finite(5)).unwrap();
    let z = ComplexPoint::new(0.3, -1.2);
    assert_eq!(kernel(z, ComplexPoint::new(0.0, 0.0), p), Complex64::new(1.0, 0.0));

    // Arguments with large negative real part cancel catastrophically in any
    // power series, so the grid stays where |e^w| is not far below e^{|w|}.
    let inf = EnsembleParams::new(1, Size::Infinite).unwrap();
    for &(a, b) in &[((0.5, 0.5), (1.0, -0.2)), ((3.0, 1.0), (2.0, 2.5)), ((-1.0, 0.0), (1.5, 0.5))] {
        let z = ComplexPoint::new(a.0, a.1);
        let xi = ComplexPoint::new(b.0, b.1);
        let want = (Complex64::from(z) * Complex64::from(xi).conj()).exp();
        let got = kernel(z, xi, inf);
        assert!((got - want).norm() <= 1e-12 * want.norm(), "{got} vs {want}");
    }
}

#[test]
fn log_joint_density_single_point() {
    let z = ComplexPoint::new(0.7, -0.4);
    let got = log_joint_density(&[z], 1, &cfg()).unwrap();
    assert!((got - (-PI.ln() - z.norm_sqr())).abs() < 1e-14);
}

#[test]
fn log_joint_density_integrates_to_one() {
    // N = 1, n = 1 in polar coordinates.
    let c = cfg();
    let f = |r: f64| 2.0 * PI * r * log_joint_density(&[ComplexPoint::new(r, 0.0)], 1, &c).unwrap().exp();
    let v = integrate(f, 0.0, 12.0, 1e-14, 1e-12, 200).value;
    assert!((v - 1.0).abs() < 1e-6);
}

#[test]
fn coincident_points_have_zero_density() {
    let z = ComplexPoint::new(0.2, 0.1);
    assert_eq!(log_joint_density(&[z, z], 1, &cfg()).unwrap(), f64::NEG_INFINITY);
}

#[test]
fn two_point_determinant_identity() {
    let c = cfg();
    let mut rng = substream(5, 0);
    for n in 1..=3u32 {
        let p = EnsembleParams::finite(n, 2).unwrap();
        for _ in 0..20 {
            let z1 = ComplexPoint::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
            let z2 = ComplexPoint::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
            let det = kernel(z1, z1, p) * kernel(z2, z2, p) - kernel(z1, z2, p) * kernel(z2, z1, p);
            let w = weight_w_n(z1, n, &c).unwrap() * weight_w_n(z2, n, &c).unwrap();
            let want = det.re * w / PI.powi(2 * n as i32);
            let got = log_joint_density(&[z1, z2], n, &c).unwrap().exp();
            assert!(rel_err(got, want) < 1e-8, "n={n}: {got} vs {want}");
        }
    }
}

#[test]
fn permanent_small() {
    assert_eq!(permanent(&[vec![2.0]]), 2.0);
    assert_eq!(permanent(&[vec![1.0, 2.0], vec![3.0, 4.0]]), 10.0);
    let ones = vec![vec![1.0; 5]; 5];
    assert_eq!(permanent(&ones), 120.0);
}

#[test]
fn moduli_density_single_point() {
    let c = cfg();
    for &r in &[0.1, 0.9, 2.5] {
        let got = moduli_joint_density(&[r], 1, &c).unwrap();
        assert!(rel_err(got, 2.0 * r * (-r * r).exp()) < 1e-13);
    }
}

#[test]
fn moduli_density_symmetric_and_capped() {
    let c = cfg();
    let a = moduli_joint_density(&[0.4, 1.3], 2, &c).unwrap();
    let b = moduli_joint_density(&[1.3, 0.4], 2, &c).unwrap();
    assert!(rel_err(a, b) < 1e-15);
    assert!(matches!(
        moduli_joint_density(&[1.0; 13], 1, &c),
        Err(Error::TooLarge { .. })
    ));
}

#[test]
fn radial_density_n1_is_gamma() {
    let c = cfg();
    for k in 1..=6u32 {
        for &x in &[0.05, 1.0, 4.0, 15.0] {
            let want = (f64::from(k - 1) * f64::ln(x) - x - common::ln_gamma_ref(f64::from(k))).exp();
            assert!(rel_err(radial_density(k, 1, x, &c).unwrap(), want) < 1e-12);
        }
    }
}

#[test]
fn radial_density_is_survival_derivative() {
    let c = cfg();
    for n in 1..=3u32 {
        for k in 1..=4u32 {
            for &x in &[0.3, 1.0, 3.0, 9.0] {
                let h = 1e-4 * x;
                let s = |y: f64| survival_log(k, n, y, &c).unwrap().prob();
                let fd = (s(x - h) - s(x + h)) / (2.0 * h);
                let d = radial_density(k, n, x, &c).unwrap();
                assert!(rel_err(fd, d) < 1e-4, "k={k} n={n} x={x}: {fd} vs {d}");
            }
        }
    }
}

/// Probability that the smaller modulus of a 2×2 Ginibre matrix falls in
/// `[a, b]`, from the ordered-region joint density.
fn min_modulus_mass(a: f64, b: f64, c: &MeijerGConfig) -> f64 {
    let marginal = |r1: f64| {
        if r1 <= 0.0 {
            return 0.0;
        }
        integrate(|r2| moduli_joint_density(&[r1, r2], 1, c).unwrap(), r1, r1 + 9.0, 1e-13, 1e-9, 100).value
    };
    integrate(marginal, a, b, 1e-12, 1e-8, 100).value
}

#[test]
fn eigen_moduli_histogram_matches_joint_density() {
    let c = cfg();
    let draws = 20_000usize;
    let edges = [0.0, 0.2, 0.4, 0.6, 0.8, 1.0, 1.3, 1.8];
    for size in 1..=2usize {
        let p = EnsembleParams::finite(1, size).unwrap();
        let mut rng = substream(2, size as u64);
        let mut counts = vec![0u64; edges.len() - 1];
        for _ in 0..draws {
            let m = sample_product_matrix(p, &mut rng).unwrap();
            let r = eigen_moduli(&m).unwrap()[0];
            if let Some(i) = edges.windows(2).position(|w| w[0] <= r && r < w[1]) {
                counts[i] += 1;
            }
        }
        for (i, w) in edges.windows(2).enumerate() {
            let want = if size == 1 {
                (-w[0] * w[0]).exp() - (-w[1] * w[1]).exp()
            } else {
                min_modulus_mass(w[0], w[1], &c)
            };
            let got = counts[i] as f64 / draws as f64;
            // 3σ per bin over 14 bins: a fixed seed keeps this deterministic.
            let sigma = (want * (1.0 - want) / draws as f64).sqrt();
            assert!((got - want).abs() <= 3.0 * sigma, "N={size} bin {i}: {got} vs {want}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn weight_rotation_invariant(r in 0.01f64..6.0, phi in 0.0f64..6.28, n in 1u32..4) {
        let c = cfg();
        let a = weight_w_n(ComplexPoint::new(r, 0.0), n, &c).unwrap();
        let b = weight_w_n(ComplexPoint::new(r * phi.cos(), r * phi.sin()), n, &c).unwrap();
        prop_assert!(rel_err(a, b) < 1e-12);
    }

    #[test]
    fn kernel_hermitian(
        a in -3.0f64..3.0, b in -3.0f64..3.0, c in -3.0f64..3.0, d in -3.0f64..3.0,
        n in 1u32..4, size in 1usize..8,
    ) {
        let p = EnsembleParams::finite(n, size).unwrap();
        let z = ComplexPoint::new(a, b);
        let xi = ComplexPoint::new(c, d);
        let k1 = kernel(z, xi, p);
        let k2 = kernel(xi, z, p).conj();
        prop_assert!((k1 - k2).norm() <= 1e-13 * k1.norm().max(1.0));
    }

    #[test]
    fn joint_density_permutation_invariant(
        pts in proptest::collection::vec((-2.0f64..2.0, -2.0f64..2.0), 4),
        n in 1u32..3,
    ) {
        let c = cfg();
        let z: Vec<ComplexPoint> = pts.iter().map(|&(a, b)| ComplexPoint::new(a, b)).collect();
        let mut rev = z.clone();
        rev.reverse();
        rev.swap(0, 1);
        let a = log_joint_density(&z, n, &c).unwrap();
        let b = log_joint_density(&rev, n, &c).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
    }

    #[test]
    fn radial_density_nonnegative(k in 1u32..12, n in 1u32..4, x in 1e-6f64..200.0) {
        let v = radial_density(k, n, x, &cfg()).unwrap();
        prop_assert!(v >= 0.0 && v.is_finite());
    }
}
