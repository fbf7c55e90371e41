#![allow(dead_code)]

use diskfrac::basis::{BasisIndex, CoeffVec, Mu, PolarPoint, Truncation};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn idx(l: usize, n: usize, mu: i64) -> BasisIndex {
    BasisIndex::new(l, n, Mu::from_sign(mu).unwrap()).unwrap()
}

/// Hypergeometric series for `P_n^{(a,b)}(t)` with Pochhammer products (valid for any real `a`):
/// `Σ_k (n+a+b+1)_k/k! · (a+k+1)_{n−k}/(n−k)! · ((t−1)/2)^k`.
pub fn jacobi_series(n: usize, a: f64, b: f64, t: f64) -> f64 {
    let x = 0.5 * (t - 1.0);
    let mut total = 0.0;
    for k in 0..=n {
        let mut term = 1.0;
        for j in 0..k {
            term *= (n as f64 + a + b + 1.0 + j as f64) / (j + 1) as f64;
        }
        for j in 0..(n - k) {
            term *= (a + k as f64 + 1.0 + j as f64) / (j + 1) as f64;
        }
        total += term * x.powi(k as i32);
    }
    total
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian(r: &mut ChaCha8Rng) -> f64 {
    r.sample(StandardNormal)
}

/// Dense random expansion on `trunc`.
pub fn random_coeffs(seed: u64, gamma: f64, prefactor: f64, trunc: Truncation) -> CoeffVec {
    let mut r = rng(seed);
    let modes = trunc.modes();
    let vals: Vec<f64> = modes.iter().map(|_| gaussian(&mut r)).collect();
    CoeffVec::from_dense(gamma, prefactor, trunc, &modes, &vals).unwrap()
}

/// Random interior points with `r ≤ r_max`.
pub fn interior_points(seed: u64, count: usize, r_max: f64) -> Vec<PolarPoint> {
    let mut r = rng(seed);
    (0..count)
        .map(|_| {
            let rad = r_max * r.random::<f64>().sqrt();
            let phi = 2.0 * std::f64::consts::PI * r.random::<f64>();
            PolarPoint::new(rad, phi).unwrap()
        })
        .collect()
}

pub fn cart(x: f64, y: f64) -> PolarPoint {
    PolarPoint::new((x * x + y * y).sqrt(), y.atan2(x)).unwrap()
}

/// Centered differences of `f` at `p` with step `h`.
pub fn fd_grad(f: impl Fn(PolarPoint) -> f64, p: PolarPoint, h: f64) -> (f64, f64) {
    let (x, y) = (p.x(), p.y());
    let dx = (f(cart(x + h, y)) - f(cart(x - h, y))) / (2.0 * h);
    let dy = (f(cart(x, y + h)) - f(cart(x, y - h))) / (2.0 * h);
    (dx, dy)
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1e-300)
}

pub mod exact {
    use num_bigint::BigInt;
    use num_rational::BigRational;
    use num_traits::{One, ToPrimitive, Zero};

    pub fn q(num: i64, den: i64) -> BigRational {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    /// The hypergeometric series for `P_n^{(a,b)}(t)` in exact rational arithmetic.
    pub fn jacobi_series(n: usize, a: &BigRational, b: &BigRational, t: &BigRational) -> f64 {
        let one = BigRational::one();
        let x = (t - &one) / q(2, 1);
        let mut total = BigRational::zero();
        let mut xk = BigRational::one();
        for k in 0..=n {
            let mut term = BigRational::one();
            for j in 0..k {
                term *= (q(n as i64 + 1 + j as i64, 1) + a + b) / q(j as i64 + 1, 1);
            }
            for j in 0..(n - k) {
                term *= (a + q(k as i64 + 1 + j as i64, 1)) / q(j as i64 + 1, 1);
            }
            total += term * &xk;
            xk *= &x;
        }
        total.to_f64().unwrap()
    }

    pub fn to_f64(v: &BigRational) -> f64 {
        v.to_f64().unwrap()
    }
}
