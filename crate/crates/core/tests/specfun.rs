mod common;

use common::exact;
use diskfrac::quadrature::gauss_jacobi_rule;
use diskfrac::specfun::{gamma_quotient, gamma_ratio, jacobi_eval, jacobi_norm, jacobi_norm_sq, ln_gamma, GammaRatio};
use proptest::prelude::*;

const PARAMS: [(i64, i64); 6] = [(-1, 4), (0, 1), (1, 2), (3, 4), (1, 1), (3, 1)];

#[test]
fn recurrence_agrees_with_exact_series() {
    let ts: Vec<(i64, i64)> = (-8..=8).map(|k| (k, 8)).chain([(-7, 9), (5, 11)]).collect();
    let mut worst: f64 = 0.0;
    for &(an, ad) in &PARAMS {
        for &(bn, bd) in &PARAMS {
            let (a, b) = (exact::q(an, ad), exact::q(bn, bd));
            for &(tn, td) in &ts {
                let t = exact::q(tn, td);
                for n in [0usize, 1, 2, 3, 7, 15, 30, 50] {
                    let want = exact::jacobi_series(n, &a, &b, &t);
                    let got = jacobi_eval(n as i64, an as f64 / ad as f64, bn as f64 / bd as f64, tn as f64 / td as f64).unwrap();
                    let err = (got - want).abs() / want.abs().max(1.0);
                    worst = worst.max(err);
                    assert!(err <= 1e-11, "n={n} a={an}/{ad} b={bn}/{bd} t={tn}/{td}: {got} vs {want}");
                }
            }
        }
    }
    println!("worst scaled recurrence error {worst:e}");
}

#[test]
fn degree_one_and_endpoint_closed_forms() {
    assert!((jacobi_eval(1, 0.0, 0.0, 0.3).unwrap() - 0.3).abs() < 1e-16);
    // P_n^{(a,b)}(1) = Γ(n+a+1)/(n! Γ(a+1))
    for n in 0..20 {
        let want = gamma_quotient(&[n as f64 + 1.75], &[n as f64 + 1.0, 1.75]).unwrap();
        let got = jacobi_eval(n, 0.75, 3.0, 1.0).unwrap();
        assert!((got - want).abs() <= 1e-12 * want, "n={n}");
    }
}

#[test]
fn norm_matches_quadrature_and_orthogonality() {
    for &(a, b) in &[(0.75, 2.0), (-0.25, 0.0), (0.5, 3.0), (0.0, 7.0)] {
        let rule = gauss_jacobi_rule(40, a, b).unwrap();
        for n in 0..=30i64 {
            let quad = rule.integrate(|t| jacobi_eval(n, a, b, t).unwrap().powi(2));
            let closed = jacobi_norm_sq(n as u64, a, b).unwrap();
            assert!((quad - closed).abs() <= 1e-10 * closed, "a={a} b={b} n={n}: {quad} vs {closed}");
            for m in 0..n {
                let cross = rule.integrate(|t| jacobi_eval(n, a, b, t).unwrap() * jacobi_eval(m, a, b, t).unwrap());
                assert!(cross.abs() <= 1e-10 * closed.max(1.0), "a={a} b={b} n={n} m={m}: {cross}");
            }
        }
    }
    let want = jacobi_norm(3, 0.75, 2.0).unwrap().powi(2);
    let quad = gauss_jacobi_rule(6, 0.75, 2.0).unwrap().integrate(|t| jacobi_eval(3, 0.75, 2.0, t).unwrap().powi(2));
    assert!((quad - want).abs() < 1e-10 * want);
}

#[test]
fn ln_gamma_of_half_is_half_log_pi() {
    let want = 0.5 * std::f64::consts::PI.ln();
    assert!((ln_gamma(0.5).unwrap() - want).abs() < 1e-15);
}

#[test]
fn gamma_ratio_large_arguments_do_not_overflow() {
    let r = GammaRatio::new(vec![1e6 + 0.75], vec![1e6]).unwrap();
    let v = gamma_ratio(&r) / 1e6f64.powf(0.75);
    assert!((v - 1.0).abs() < 1e-6);
    let big = GammaRatio::new(vec![1e6, 1e6 + 3.5], vec![1e6 + 1.0, 1e6 + 2.5]).unwrap();
    assert!(gamma_ratio(&big).is_finite());
}

/// `Γ(n+σ)/(Γ(n) n^σ)` at large `n`.
fn stirling_quotient(n: f64, sigma: f64) -> f64 {
    (GammaRatio::new(vec![n + sigma], vec![n]).unwrap().ln() - sigma * n.ln()).exp()
}

#[test]
fn stirling_limit_within_tolerance_where_it_holds() {
    // |quotient − 1| ≈ |σ(σ−1)|/(2n); at n = 1e6 that stays below 1e-6 for σ ∈ (−1, 2).
    for n in [1e6, 4e6, 1e7] {
        for k in -3..=7 {
            let sigma = k as f64 * 0.25;
            let q = stirling_quotient(n, sigma);
            assert!((q - 1.0).abs() <= 1e-6, "n={n} σ={sigma}: {q}");
        }
    }
    // the full range σ ∈ [−2, 2] meets 1e-6 once n ≥ 1e7
    for k in -8..=8 {
        let sigma = k as f64 * 0.25;
        assert!((stirling_quotient(1e7, sigma) - 1.0).abs() <= 1e-6, "σ={sigma}");
    }
    // and misses it at n = 1e6, σ = −2, by the predicted 3e-6
    let dev = stirling_quotient(1e6, -2.0) - 1.0;
    assert!((dev - 3e-6).abs() < 1e-10, "{dev}");
}

#[test]
fn stirling_second_order_term_over_full_sigma_range() {
    for n in [1e6, 1e7] {
        for k in -8..=8 {
            let sigma = k as f64 * 0.25;
            let q = stirling_quotient(n, sigma);
            let predicted = 1.0 + sigma * (sigma - 1.0) / (2.0 * n);
            assert!((q - predicted).abs() <= 1e-8, "n={n} σ={sigma}: {q} vs {predicted}");
        }
    }
}

proptest! {
    #[test]
    fn ln_gamma_satisfies_recurrence(x in 1e-3f64..1e6) {
        let lhs = ln_gamma(x + 1.0).unwrap();
        let rhs = ln_gamma(x).unwrap() + x.ln();
        prop_assert!((lhs - rhs).abs() <= 1e-13 * lhs.abs().max(1.0));
    }

    #[test]
    fn reflection_at_half_integers(k in 0usize..30) {
        // Γ(k + 1/2) = (2k)! √π / (4^k k!)
        let x = k as f64 + 0.5;
        let mut want = 0.5 * std::f64::consts::PI.ln();
        for j in 1..=k {
            want += ((2 * j) as f64 * (2 * j - 1) as f64 / (4.0 * j as f64)).ln();
        }
        let got = ln_gamma(x).unwrap();
        prop_assert!((got - want).abs() <= 1e-13 * want.abs().max(1.0));
    }

    #[test]
    fn jacobi_symmetry(n in 0i64..40, a in -0.9f64..4.0, b in -0.9f64..4.0, t in -1.0f64..1.0) {
        // P_n^{(a,b)}(−t) = (−1)^n P_n^{(b,a)}(t)
        let lhs = jacobi_eval(n, a, b, -t).unwrap();
        let rhs = if n % 2 == 0 { 1.0 } else { -1.0 } * jacobi_eval(n, b, a, t).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-10 * lhs.abs().max(1.0));
    }
}
