mod common;

use common::{fd_grad, idx, interior_points, random_coeffs, rel_close};
use diskfrac::basis::{basis_norm_sq, BasisIndex, CoeffVec, Mu, PolarPoint, Truncation, VecCoeffField};
use diskfrac::ops::{
    frac_laplacian_eigenvalue, grad_unweighted, grad_weighted, pair_constant_k, riesz_apply, riesz_grad, riesz_scalar,
    test_map, test_map_factor, unit_mode, w_residual, OperatorContext, Sym2,
};
use diskfrac::specfun::{gamma_ratio, GammaRatio};
use proptest::prelude::*;

const ALPHAS: [f64; 3] = [1.2, 1.5, 1.8];

fn fd_agrees(field: &VecCoeffField, f: impl Fn(PolarPoint) -> f64, seed: u64) {
    for p in interior_points(seed, 200, 0.9) {
        let (dx, dy) = fd_grad(&f, p, 1e-5);
        let (gx, gy) = (field.x.eval(p), field.y.eval(p));
        let tol = 1e-6 * dx.abs().max(dy.abs()).max(1.0);
        assert!((gx - dx).abs() <= tol && (gy - dy).abs() <= tol, "at {p:?}: ({gx}, {gy}) vs ({dx}, {dy})");
    }
}

#[test]
fn weighted_gradient_matches_finite_differences() {
    let t = Truncation::new(5, 5);
    for (k, gamma) in [0.6, 0.75, 0.9, 1.5, 2.5].into_iter().enumerate() {
        let u = random_coeffs(100 + k as u64, gamma, gamma, t);
        let g = grad_weighted(&u).unwrap();
        assert!(rel_close(g.gamma(), gamma - 1.0, 1e-15) && rel_close(g.prefactor(), gamma - 1.0, 1e-15));
        fd_agrees(&g, |p| u.eval(p), 7 + k as u64);
    }
}

#[test]
fn plain_gradient_matches_finite_differences() {
    let t = Truncation::new(5, 5);
    for (k, gamma) in [-0.5, 0.0, 0.75, 2.0].into_iter().enumerate() {
        let p = random_coeffs(200 + k as u64, gamma, 0.0, t);
        let g = grad_unweighted(&p).unwrap();
        assert!(rel_close(g.gamma(), gamma + 1.0, 1e-15));
        fd_agrees(&g, |q| p.eval(q), 17 + k as u64);
    }
}

/// `∇(ω^γ 𝒱_{l,μ})` from the product rule and `∇ Re z^l = l(Re z^{l−1}, −Im z^{l−1})`.
fn exact_mode_gradient(l: usize, mu: Mu, gamma: f64, p: PolarPoint) -> (f64, f64) {
    let (x, y) = (p.x(), p.y());
    let w = 1.0 - x * x - y * y;
    let z = |k: i32| {
        let r = p.r.powi(k);
        (r * (k as f64 * p.phi).cos(), r * (k as f64 * p.phi).sin())
    };
    let (re, im) = z(l as i32);
    let h = if l == 0 { 0.5 } else if mu == Mu::Cos { re } else { im };
    let (dhx, dhy) = if l == 0 {
        (0.0, 0.0)
    } else {
        let (re1, im1) = z(l as i32 - 1);
        let lf = l as f64;
        match mu {
            Mu::Cos => (lf * re1, -lf * im1),
            Mu::Sin => (lf * im1, lf * re1),
        }
    };
    let wg = w.powf(gamma);
    let dw = -2.0 * gamma * w.powf(gamma - 1.0);
    (dw * x * h + wg * dhx, dw * y * h + wg * dhy)
}

#[test]
fn sign_table_matches_symbolic_derivatives() {
    let gamma = 0.75;
    let t = Truncation::new(3, 0);
    for l in 0..=3 {
        for mu in [Mu::Cos, Mu::Sin] {
            let Ok(i) = BasisIndex::new(l, 0, mu) else { continue };
            let g = grad_weighted(&unit_mode(i, gamma, gamma, t).unwrap()).unwrap();
            for p in interior_points(31, 50, 0.95) {
                let (ex, ey) = exact_mode_gradient(l, mu, gamma, p);
                assert!((g.x.eval(p) - ex).abs() < 1e-13, "l={l} {mu:?} x at {p:?}");
                assert!((g.y.eval(p) - ey).abs() < 1e-13, "l={l} {mu:?} y at {p:?}");
            }
        }
    }
}

/// Stencil output with the doubling at constant-harmonic targets removed.
fn without_constant_doubling(f: &VecCoeffField) -> VecCoeffField {
    let halve = |c: &CoeffVec| c.map_modes(|i| if i.l() == 0 { 0.5 } else { 1.0 });
    VecCoeffField::new(halve(&f.x), halve(&f.y)).unwrap()
}

#[test]
fn constant_target_doubling_is_required() {
    // a mode feeding the constant harmonic: the undoubled stencil misses the derivative
    let gamma = 0.75;
    let u = unit_mode(idx(1, 0, 1), gamma, gamma, Truncation::new(2, 2)).unwrap();
    let g = grad_weighted(&u).unwrap();
    let bad = without_constant_doubling(&g);
    let p = PolarPoint::new(0.3, 0.4).unwrap();
    let (ex, _) = exact_mode_gradient(1, Mu::Cos, gamma, p);
    assert!((g.x.eval(p) - ex).abs() < 1e-13);
    assert!((bad.x.eval(p) - ex).abs() > 1e-2);
}

#[test]
fn single_mode_examples() {
    let t = Truncation::new(2, 2);
    for alpha in ALPHAS {
        let h = alpha / 2.0;
        let u = unit_mode(idx(0, 0, 1), h, h, t).unwrap();
        let g = grad_weighted(&u).unwrap();
        assert_eq!(g.x.len(), 1);
        assert_eq!(g.y.len(), 1);
        assert!(rel_close(g.x.get(&idx(1, 0, 1)), -h, 1e-15));
        assert!(rel_close(g.y.get(&idx(1, 0, -1)), -h, 1e-15));

        let v = riesz_grad(&u, alpha).unwrap();
        let c2 = -(2f64.powf(alpha - 2.0)) * gamma_ratio(&GammaRatio::new(vec![1.0 + h, h], vec![1.0, 2.0]).unwrap());
        assert!(rel_close(v.x.get(&idx(1, 0, 1)), c2 * h, 1e-14));
        assert!(rel_close(v.y.get(&idx(1, 0, -1)), c2 * h, 1e-14));
        assert!(v.prefactor() == 0.0 && rel_close(v.gamma(), h - 1.0, 1e-15));
    }
    // ∇x = (1, 0)
    let x = unit_mode(idx(1, 0, 1), 0.3, 0.0, t).unwrap();
    let g = grad_unweighted(&x).unwrap();
    assert_eq!(g.x.len(), 1);
    assert!(g.y.is_empty());
    assert!((g.x.eval(PolarPoint::new(0.4, 1.0).unwrap()) - 1.0).abs() < 1e-15);
    let c = unit_mode(idx(0, 0, 1), 0.3, 0.0, t).unwrap();
    let g = grad_unweighted(&c).unwrap();
    assert!(g.x.is_empty() && g.y.is_empty());
    let z = CoeffVec::zeros(0.75, 0.75, t).unwrap();
    let g = grad_weighted(&z).unwrap();
    assert!(g.x.is_empty() && g.y.is_empty());
}

#[test]
fn representation_mismatch_is_rejected() {
    let t = Truncation::new(2, 2);
    let wrong = CoeffVec::zeros(0.75, 0.0, t).unwrap();
    assert!(grad_weighted(&wrong).is_err());
    assert!(riesz_grad(&wrong, 1.5).is_err());
    assert!(test_map(&wrong, 1.5, 0.0).is_err());
    assert!(grad_unweighted(&CoeffVec::zeros(0.75, 0.75, t).unwrap()).is_err());
    assert!(riesz_apply(&CoeffVec::zeros(0.75, 0.75, t).unwrap(), 1.5, 1).is_err());
}

#[test]
fn riesz_grad_equals_riesz_of_weighted_gradient() {
    let t = Truncation::new(8, 8);
    for (k, alpha) in [0.6, 1.2, 1.5, 1.8, 2.0].into_iter().enumerate() {
        let h = alpha / 2.0;
        let v = random_coeffs(300 + k as u64, h, h, t);
        let direct = riesz_grad(&v, alpha).unwrap();
        let g = grad_weighted(&v).unwrap();
        let cx = riesz_apply(&g.x, alpha, 1).unwrap();
        let cy = riesz_apply(&g.y, alpha, 1).unwrap();
        for (a, b) in [(&direct.x, &cx), (&direct.y, &cy)] {
            assert_eq!(a.len(), b.len());
            // entries are sums of two stencil terms, so compare against the field's scale
            let scale = a.iter().map(|(_, v)| v.abs()).fold(0.0, f64::max);
            for (i, va) in a.iter() {
                assert!((va - b.get(i)).abs() <= 1e-13 * scale, "α={alpha} {i:?}: {va} vs {}", b.get(i));
            }
        }
    }
}

fn strip_prefactor(f: &VecCoeffField) -> VecCoeffField {
    let lift = |c: &CoeffVec| CoeffVec::from_entries(c.gamma(), 0.0, c.truncation(), c.iter().map(|(i, v)| (*i, *v)));
    VecCoeffField::new(lift(&f.x).unwrap(), lift(&f.y).unwrap()).unwrap()
}

fn limit_gap(m: BasisIndex, alpha: f64) -> f64 {
    let h = alpha / 2.0;
    let u = unit_mode(m, h, h, Truncation::new(m.l(), m.n())).unwrap();
    let a = riesz_grad(&u, alpha).unwrap();
    let b = strip_prefactor(&grad_weighted(&u).unwrap());
    a.sub(&b).unwrap().norm(0.0) / b.norm(0.0)
}

#[test]
fn riesz_grad_tends_to_weighted_gradient() {
    // the gap is (2 − α)·O(1 + log(n + l)): 1e-3 at α = 1.999 holds on the lowest mode only
    assert!(limit_gap(idx(0, 0, 1), 1.999) <= 1e-3);
    for m in Truncation::new(40, 40).modes() {
        let gap = limit_gap(m, 1.999);
        let budget = 1e-3 * (1.0 + ((m.n() + m.l() + 2) as f64).ln());
        assert!(gap <= budget, "{m:?}: {gap} > {budget}");
        let closer = limit_gap(m, 1.9999);
        assert!((gap / closer - 10.0).abs() < 0.1, "{m:?}: {gap} vs {closer}");
    }
}

#[test]
fn riesz_scalar_examples() {
    let (t, f) = riesz_scalar(idx(0, 0, 1), 1.0, 1).unwrap().unwrap();
    assert_eq!(t, idx(0, 0, 1));
    assert!(rel_close(f, std::f64::consts::PI / 2.0, 1e-14));
    for l in 0..5 {
        for n in 0..5 {
            let (_, f) = riesz_scalar(idx(l, n, 1), 2.0, 1).unwrap().unwrap();
            assert!(rel_close(f, 1.0, 1e-14));
        }
    }
    // s = 0 raises the radial index and flips the sign
    let (t, f) = riesz_scalar(idx(3, 2, -1), 1.5, 0).unwrap().unwrap();
    assert_eq!(t, idx(3, 3, -1));
    assert!(f < 0.0);
    assert!(riesz_scalar(idx(0, 0, 1), 1.5, 2).is_err());
    assert!(OperatorContext::new(1.5, 2).is_err());
    assert!(OperatorContext::new(1.5, 1).is_ok());
}

#[test]
fn eigenvalue_examples() {
    assert!(rel_close(frac_laplacian_eigenvalue(idx(0, 0, 1), 1.0).unwrap(), std::f64::consts::PI / 2.0, 1e-14));
    for l in 0..6 {
        for n in 0..6 {
            let lam = frac_laplacian_eigenvalue(idx(l, n, 1), 2.0).unwrap();
            assert!(rel_close(lam, 4.0 * (n + 1) as f64 * (n + l + 1) as f64, 1e-13));
        }
    }
}

proptest! {
    #[test]
    fn eigenvalues_increase(l in 0usize..200, n in 0usize..200, alpha in 0.05f64..2.0) {
        let base = frac_laplacian_eigenvalue(idx(l, n, 1), alpha).unwrap();
        prop_assert!(frac_laplacian_eigenvalue(idx(l, n + 1, 1), alpha).unwrap() > base);
        prop_assert!(frac_laplacian_eigenvalue(idx(l + 1, n, 1), alpha).unwrap() > base);
    }

    #[test]
    fn gradients_are_linear(s1 in 0u64..1000, s2 in 0u64..1000, c in -3.0f64..3.0, alpha in 1.05f64..1.95) {
        let h = alpha / 2.0;
        let t = Truncation::new(4, 4);
        let a = random_coeffs(s1, h, h, t);
        let b = random_coeffs(s2 + 5000, h, h, t);
        let sum = a.axpy(c, &b).unwrap();
        for op in [0, 1] {
            let f = |u: &CoeffVec| if op == 0 { grad_weighted(u).unwrap() } else { riesz_grad(u, alpha).unwrap() };
            let (fa, fb, fs) = (f(&a), f(&b), f(&sum));
            let lin = VecCoeffField::new(fa.x.axpy(c, &fb.x).unwrap(), fa.y.axpy(c, &fb.y).unwrap()).unwrap();
            let diff = fs.sub(&lin).unwrap();
            prop_assert!(diff.norm(0.0) <= 1e-12 * (1.0 + lin.norm(0.0)));
        }
    }
}

#[test]
fn pseudo_eigen_identity() {
    let t = Truncation::new(6, 6);
    let modes = t.modes();
    for alpha in ALPHAS {
        let h = alpha / 2.0;
        let us: Vec<_> = modes.iter().map(|m| grad_weighted(&unit_mode(*m, h, h, t).unwrap()).unwrap()).collect();
        let vs: Vec<_> = modes.iter().map(|m| riesz_grad(&unit_mode(*m, h, h, t).unwrap(), alpha).unwrap()).collect();
        for (i, mi) in modes.iter().enumerate() {
            let diag = frac_laplacian_eigenvalue(*mi, alpha).unwrap() * basis_norm_sq(*mi, h).unwrap();
            for (j, _) in modes.iter().enumerate() {
                let b = pair_constant_k(Sym2::IDENTITY, &us[i], &vs[j]).unwrap();
                if i == j {
                    assert!(rel_close(b, diag, 1e-10), "α={alpha} {mi:?}: {b} vs {diag}");
                } else {
                    assert!(b.abs() <= 1e-10 * diag, "α={alpha} ({i},{j}): {b}");
                }
            }
        }
    }
}

#[test]
fn test_map_examples() {
    // at α = 2 every multiplier is exactly one
    for l in 0..6 {
        for n in 0..6 {
            assert!(rel_close(test_map_factor(idx(l, n, 1), 2.0, 0.0).unwrap(), 1.0, 1e-14));
        }
    }
    let want = 2f64.sqrt() * 4.0 * gamma_ratio(&GammaRatio::new(vec![4.0, 6.0], vec![4.75, 5.75]).unwrap());
    assert!(rel_close(test_map_factor(idx(2, 3, -1), 1.5, 0.0).unwrap(), want, 1e-14));
    let weighted = test_map_factor(idx(2, 3, -1), 1.5, 0.5).unwrap();
    assert!(rel_close(weighted, want * (4.0f64 * 6.0).sqrt(), 1e-14));
    let t = Truncation::new(3, 3);
    let z = CoeffVec::zeros(0.75, 0.75, t).unwrap();
    assert!(test_map(&z, 1.5, 0.0).unwrap().is_empty());
}

#[test]
fn residual_of_single_mode_lives_on_raised_targets() {
    let t = Truncation::new(5, 5);
    for alpha in ALPHAS {
        let h = alpha / 2.0;
        for m in t.modes() {
            let u = unit_mode(m, h, h, t).unwrap();
            let w = w_residual(&grad_weighted(&u).unwrap(), &riesz_grad(&test_map(&u, alpha, 0.0).unwrap(), alpha).unwrap())
                .unwrap();
            for (i, v) in w.x.iter().chain(w.y.iter()) {
                let raised = i.l() == m.l() + 1 && i.n() == m.n();
                assert!(raised || v.abs() < 1e-13, "{m:?} → {i:?}: {v}");
            }
            if m.l() == 0 {
                assert!(w.norm(0.0) < 1e-13, "{m:?}");
            }
        }
    }
}

#[test]
fn residual_bound_on_random_vectors() {
    let t = Truncation::new(10, 10);
    for alpha in [1.1f64, 1.5, 1.9] {
        let h = alpha / 2.0;
        let bound = (2.0 - alpha) / (alpha * (2.0 + alpha) as f64).sqrt();
        for seed in 0..100 {
            let u = random_coeffs(seed, h, h, t);
            let big_u = grad_weighted(&u).unwrap();
            let big_v = riesz_grad(&test_map(&u, alpha, 0.0).unwrap(), alpha).unwrap();
            let w = w_residual(&big_u, &big_v).unwrap();
            let ratio = w.norm(0.0) / big_u.norm(0.0);
            assert!(ratio <= bound, "α={alpha} seed={seed}: {ratio} > {bound}");
        }
    }
    let z = random_coeffs(1, 0.75, 0.75, t);
    let u = grad_weighted(&z).unwrap();
    assert!(w_residual(&u, &u).unwrap().norm(0.0) == 0.0);
}
