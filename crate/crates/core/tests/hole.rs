mod common;

use ginibre_core::hole::{
    hole_asympt_log, hole_bounds_infinite, hole_exact_log, hole_infinite_log, hole_mc, hole_report, truncation_rank,
    HoleOptions,
};
use ginibre_core::special_fn::survival_log;
use ginibre_core::{EnsembleParams, Error, MeijerGConfig, Size};
use proptest::prelude::*;

fn cfg() -> MeijerGConfig {
    MeijerGConfig::default()
}

#[test]
fn exact_examples() {
    let c = cfg();
    let p = EnsembleParams::finite(1, 2).unwrap();
    let v = hole_exact_log(p, 1.0, &c).unwrap().log_value();
    assert!((v - (2f64.ln() - 2.0)).abs() < 1e-14);
    for n in 1..=3 {
        let p = EnsembleParams::finite(n, 4).unwrap();
        assert!(hole_exact_log(p, 1e-6, &c).unwrap().log_value() > -1e-5);
    }
}

#[test]
fn exact_matches_incomplete_gamma_oracle() {
    let c = cfg();
    for &r in &[0.5, 1.5, 4.0] {
        let p = EnsembleParams::finite(1, 8).unwrap();
        let want: f64 = (1..=8).map(|k| common::ln_gamma_q(f64::from(k), r * r)).sum();
        let got = hole_exact_log(p, r, &c).unwrap().log_value();
        assert!(common::rel_err(got, want) < 1e-11);
    }
}

#[test]
fn asymptotics_single_factor_exact() {
    let p = EnsembleParams::finite(1, 1).unwrap();
    for &r in &[0.5, 2.0, 7.0] {
        assert!((hole_asympt_log(p, r).unwrap() + r * r).abs() < 1e-12 * r * r);
    }
}

#[test]
fn asymptotic_gap_decays() {
    let c = cfg();
    let p = EnsembleParams::finite(2, 2).unwrap();
    let gap = |r: f64| (hole_exact_log(p, r, &c).unwrap().log_value() - hole_asympt_log(p, r).unwrap()).abs();
    let (g20, g40) = (gap(20.0), gap(40.0));
    let ratio = g40 / g20;
    assert!((0.3..=0.8).contains(&ratio), "{ratio}");
}

#[test]
fn infinite_matches_large_finite() {
    let c = cfg();
    let inf = hole_infinite_log(1, 3.0, 1e-12, &c).unwrap();
    let fin = hole_exact_log(EnsembleParams::finite(1, 1000).unwrap(), 3.0, &c).unwrap();
    assert!((inf.value.log_value() - fin.log_value()).abs() < 1e-8);
    assert!(inf.truncated.log_value() - inf.value.log_value() < 2e-12);
}

#[test]
fn finite_converges_to_infinite_within_tail() {
    let c = cfg();
    for n in 1..=3 {
        let inf = hole_infinite_log(n, 2.0, 1e-12, &c).unwrap();
        let big = EnsembleParams::finite(n, inf.truncation_rank + 40).unwrap();
        let fin = hole_exact_log(big, 2.0, &c).unwrap().log_value();
        assert!(fin <= inf.truncated.log_value() + 1e-12);
        assert!(fin >= inf.value.log_value() - 1e-12);
    }
}

#[test]
fn bounds_bracket_infinite_value() {
    let c = cfg();
    for n in 1..=3 {
        for &r in &[2.0, 4.0, 8.0] {
            let v = hole_infinite_log(n, r, 1e-12, &c).unwrap();
            let b = hole_bounds_infinite(n, r).unwrap();
            let slack = 1e-9 * b.lower_log.abs().max(1.0);
            assert!(b.lower_log <= v.value.log_value() + slack, "n={n} r={r}");
            assert!(v.truncated.log_value() <= b.upper_log, "n={n} r={r}");
        }
    }
}

#[test]
fn lower_bound_is_exact_for_single_factor() {
    let c = cfg();
    for &r in &[2.0, 4.0, 8.0] {
        let v = hole_infinite_log(1, r, 1e-12, &c).unwrap().value.log_value();
        let b = hole_bounds_infinite(1, r).unwrap();
        assert!((b.lower_log - v).abs() < 1e-9 * v.abs().max(1.0), "r={r}: {} vs {v}", b.lower_log);
    }
}

#[test]
fn classical_decay_rate() {
    let c = cfg();
    let seq: Vec<f64> = [2.0, 4.0, 8.0, 16.0f64]
        .iter()
        .map(|&r| hole_infinite_log(1, r, 1e-12, &c).unwrap().value.log_value() / r.powi(4))
        .collect();
    for w in seq.windows(2) {
        assert!((w[1] + 0.25).abs() < (w[0] + 0.25).abs());
    }
}

#[test]
fn bounds_normalized_near_leading_rate() {
    for n in 1..=3u32 {
        let mut prev: Option<(f64, f64)> = None;
        for &r in &[4.0, 8.0, 16.0f64] {
            let b = hole_bounds_infinite(n, r).unwrap();
            let s = r.powf(4.0 / f64::from(n));
            let target = -f64::from(n) / 4.0;
            let (dl, du) = ((b.lower_log / s - target).abs(), (b.upper_log / s - target).abs());
            if let Some((pl, pu)) = prev {
                assert!(dl < pl && du < pu, "n={n} r={r}");
            }
            prev = Some((dl, du));
        }
    }
}

#[test]
fn truncation_cap_reported() {
    assert!(matches!(truncation_rank(1, 2000.0, 1e-12), Err(Error::TruncationCap { .. })));
}

#[test]
fn mc_examples() {
    let p = EnsembleParams::finite(2, 3).unwrap();
    let a = hole_mc(p, 1.0, 100_000, 7).unwrap();
    let b = hole_mc(p, 1.0, 100_000, 7).unwrap();
    assert_eq!(a, b);
    let exact = hole_exact_log(p, 1.0, &cfg()).unwrap().prob();
    let sigma = (exact * (1.0 - exact) / 1e5).sqrt();
    assert!((a.estimate - exact).abs() <= 3.0 * sigma);
    assert_eq!(hole_mc(p, 1e-9, 1000, 1).unwrap().estimate, 1.0);
}

#[test]
fn reports() {
    let c = cfg();
    let fin = EnsembleParams::finite(2, 3).unwrap();
    let opts = HoleOptions {
        mc: Some((1000, 3)),
        ..HoleOptions::default()
    };
    let rep = hole_report(fin, 1.0, &opts, &c).unwrap();
    assert!(rep.asympt_log.is_some() && rep.mc_estimate.is_some() && rep.lower_log.is_none());

    let inf = EnsembleParams::new(2, Size::Infinite).unwrap();
    let rep = hole_report(inf, 3.0, &HoleOptions::default(), &c).unwrap();
    let (lo, hi) = (rep.lower_log.unwrap(), rep.upper_log.unwrap());
    assert!(lo <= rep.exact_log.log_value() && rep.exact_log.log_value() <= hi);
    assert!(rep.truncation_rank.is_some());
    assert_eq!(hole_report(inf, 3.0, &opts, &c), Err(Error::InfiniteSize));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn factorization(n in 1u32..4, size in 1usize..7, r in 0.05f64..6.0) {
        let c = cfg();
        let p = EnsembleParams::finite(n, size).unwrap();
        let sum: f64 = (1..=size as u32).map(|k| survival_log(k, n, r * r, &c).unwrap().log_value()).sum();
        let got = hole_exact_log(p, r, &c).unwrap().log_value();
        prop_assert!((got - sum).abs() <= 1e-12 * sum.abs().max(1.0));
    }

    #[test]
    fn decreasing_in_r_and_size(n in 1u32..4, size in 1usize..6, r in 0.05f64..5.0, dr in 0.01f64..1.0) {
        let c = cfg();
        let p = EnsembleParams::finite(n, size).unwrap();
        let q = EnsembleParams::finite(n, size + 1).unwrap();
        let a = hole_exact_log(p, r, &c).unwrap().log_value();
        prop_assert!(hole_exact_log(p, r + dr, &c).unwrap().log_value() < a);
        prop_assert!(hole_exact_log(q, r, &c).unwrap().log_value() < a);
    }
}
