//! Log-gamma, gamma ratios and Jacobi polynomials.
//!
//! `ln_gamma` splits the positive axis into four regions:
//! * `x < 0.5`: one step of the recurrence `lnΓ(x) = lnΓ(x+1) − ln x`;
//! * `[0.5, 2.5)`: Taylor series of `lnΓ(1+z)` about `z = 0` (or `lnΓ(2+z)`), written with
//!   the coefficients `ζ(k) − 1` so that it converges for `|z| < 2`;
//! * `[2.5, 10)`: downward recurrence into `[1.5, 2.5)` (a sum of positive logs);
//! * `x ≥ 10`: Stirling series with Bernoulli terms through `B₁₆`.
//!
//! The `ζ(k) − 1` table was generated with mpmath at 40 digits.

use crate::error::{domain, Result};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;

/// `ζ(k) − 1` for `k = 2..=30`.
const ZETA_MINUS_ONE: [f64; 29] = [
    0.644_934_066_848_226_4,
    0.202_056_903_159_594_3,
    0.082_323_233_711_138_19,
    0.036_927_755_143_369_93,
    0.017_343_061_984_449_14,
    0.008_349_277_381_922_827,
    0.004_077_356_197_944_339,
    0.002_008_392_826_082_214,
    0.000_994_575_127_818_085_3,
    0.000_494_188_604_119_464_6,
    0.000_246_086_553_308_048_3,
    0.000_122_713_347_578_489_2,
    6.124_813_505_870_483e-5,
    3.058_823_630_702_049e-5,
    1.528_225_940_865_187e-5,
    7.637_197_637_899_762e-6,
    3.817_293_264_999_84e-6,
    1.908_212_716_553_939e-6,
    9.539_620_338_727_961e-7,
    4.769_329_867_878_065e-7,
    2.384_505_027_277_33e-7,
    1.192_199_259_653_111e-7,
    5.960_818_905_125_948e-8,
    2.980_350_351_465_228e-8,
    1.490_155_482_836_504e-8,
    7.450_711_789_835_43e-9,
    3.725_334_024_788_457e-9,
    1.862_659_723_513_049e-9,
    9.313_274_324_196_682e-10,
];

/// `B_{2k} / (2k(2k−1))` for `k = 1..=8`.
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

/// `lnΓ(1+z) + ln(1+z)` for `|z| ≤ 0.5`.
fn ln_gamma_1pz_plus_log(z: f64) -> f64 {
    let mut sum = 0.0;
    let mut zk = z;
    for (i, c) in ZETA_MINUS_ONE.iter().enumerate() {
        zk *= -z;
        let k = (i + 2) as f64;
        sum += c * zk / k;
    }
    // term k was accumulated as (−1)^{k−1} c_k z^k / k
    z * (1.0 - EULER_GAMMA) - sum
}

/// Natural log of Γ(x) for `x > 0`.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !x.is_finite() || x <= 0.0 {
        return Err(domain("ln_gamma", format!("argument must be positive and finite, got {x}")));
    }
    Ok(ln_gamma_pos(x))
}

const STIRLING_MIN: f64 = 10.0;

fn stirling_tail(x: f64) -> f64 {
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let mut series = 0.0;
    let mut p = inv;
    for c in STIRLING {
        series += c * p;
        p *= inv2;
    }
    series
}

/// `lnΓ(x+d) − lnΓ(x)` for `x, x+d ≥ 10` without forming either log-gamma.
fn ln_gamma_diff(x: f64, d: f64) -> f64 {
    let y = x + d;
    (x - 0.5) * (d / x).ln_1p() + d * y.ln() - d + stirling_tail(y) - stirling_tail(x)
}

fn ln_gamma_pos(x: f64) -> f64 {
    if x < 0.5 {
        ln_gamma_pos(x + 1.0) - x.ln()
    } else if x < 1.5 {
        let z = x - 1.0;
        ln_gamma_1pz_plus_log(z) - z.ln_1p()
    } else if x < 2.5 {
        ln_gamma_1pz_plus_log(x - 2.0)
    } else if x < STIRLING_MIN {
        let mut y = x;
        let mut prod = 1.0;
        while y >= 2.5 {
            y -= 1.0;
            prod *= y;
        }
        prod.ln() + ln_gamma_pos(y)
    } else {
        (x - 0.5) * x.ln() - x + HALF_LN_2PI + stirling_tail(x)
    }
}

/// A quotient `Π Γ(num) / Π Γ(den)` with strictly positive arguments.
#[derive(Debug, Clone, PartialEq)]
pub struct GammaRatio {
    numerator_args: Vec<f64>,
    denominator_args: Vec<f64>,
}

impl GammaRatio {
    pub fn new(numerator_args: Vec<f64>, denominator_args: Vec<f64>) -> Result<Self> {
        for &a in numerator_args.iter().chain(&denominator_args) {
            if !a.is_finite() || a <= 0.0 {
                return Err(domain("GammaRatio", format!("argument must be positive and finite, got {a}")));
            }
        }
        Ok(Self { numerator_args, denominator_args })
    }

    pub fn numerator_args(&self) -> &[f64] {
        &self.numerator_args
    }

    pub fn denominator_args(&self) -> &[f64] {
        &self.denominator_args
    }

    /// Log of the ratio. Each numerator argument is paired with the nearest unused
    /// denominator argument; pairs above the Stirling threshold are differenced directly.
    pub fn ln(&self) -> f64 {
        let mut used = vec![false; self.denominator_args.len()];
        let mut total = 0.0;
        for &x in &self.numerator_args {
            let best = self
                .denominator_args
                .iter()
                .enumerate()
                .filter(|(i, _)| !used[*i])
                .min_by(|a, b| (a.1 - x).abs().total_cmp(&(b.1 - x).abs()));
            match best {
                Some((i, &y)) if x >= STIRLING_MIN && y >= STIRLING_MIN => {
                    used[i] = true;
                    total += ln_gamma_diff(y, x - y);
                }
                _ => total += ln_gamma_pos(x),
            }
        }
        for (i, &y) in self.denominator_args.iter().enumerate() {
            if !used[i] {
                total -= ln_gamma_pos(y);
            }
        }
        total
    }

    pub fn value(&self) -> f64 {
        self.ln().exp()
    }
}

/// Evaluate a gamma ratio through log-gamma sums.
pub fn gamma_ratio(r: &GammaRatio) -> f64 {
    r.value()
}

/// Shorthand for `Π Γ(num) / Π Γ(den)`.
pub fn gamma_quotient(num: &[f64], den: &[f64]) -> Result<f64> {
    Ok(GammaRatio::new(num.to_vec(), den.to_vec())?.value())
}

fn check_params(func: &'static str, a: f64, b: f64) -> Result<()> {
    if !(a > -1.0 && b > -1.0) || !a.is_finite() || !b.is_finite() {
        return Err(domain(func, format!("Jacobi parameters must exceed -1, got a={a}, b={b}")));
    }
    Ok(())
}

/// `P_n^{(a,b)}(t)` by the three-term recurrence. Negative `n` yields 0.
pub fn jacobi_eval(n: i64, a: f64, b: f64, t: f64) -> Result<f64> {
    check_params("jacobi_eval", a, b)?;
    if !(-1.0 - 1e-12..=1.0 + 1e-12).contains(&t) {
        return Err(domain("jacobi_eval", format!("t must lie in [-1, 1], got {t}")));
    }
    if n < 0 {
        return Ok(0.0);
    }
    let mut out = vec![0.0; n as usize + 1];
    jacobi_fill(a, b, t, &mut out);
    Ok(out[n as usize])
}

/// Fill `out[k] = P_k^{(a,b)}(t)` for `k = 0..out.len()`. Parameters are assumed valid.
pub fn jacobi_fill(a: f64, b: f64, t: f64, out: &mut [f64]) {
    if out.is_empty() {
        return;
    }
    out[0] = 1.0;
    if out.len() == 1 {
        return;
    }
    out[1] = 0.5 * ((a + b + 2.0) * t + (a - b));
    let ab = a + b;
    let a2b2 = a * a - b * b;
    for k in 2..out.len() {
        let n = k as f64;
        let c = 2.0 * n + ab;
        let lead = 2.0 * n * (n + ab) * (c - 2.0);
        let p1 = (c - 1.0) * (c * (c - 2.0) * t + a2b2);
        let p2 = 2.0 * (n + a - 1.0) * (n + b - 1.0) * c;
        out[k] = (p1 * out[k - 1] - p2 * out[k - 2]) / lead;
    }
}

/// Squared norm `∫(1−t)^a(1+t)^b P_n² dt`.
pub fn jacobi_norm_sq(n: u64, a: f64, b: f64) -> Result<f64> {
    check_params("jacobi_norm", a, b)?;
    let nf = n as f64;
    let scale = (a + b + 1.0) * std::f64::consts::LN_2;
    if n == 0 {
        let g = GammaRatio::new(vec![a + 1.0, b + 1.0], vec![a + b + 2.0])?;
        return Ok((scale + g.ln()).exp());
    }
    let g = GammaRatio::new(vec![nf + a + 1.0, nf + b + 1.0], vec![nf + 1.0, nf + a + b + 1.0])?;
    Ok((scale + g.ln()).exp() / (2.0 * nf + a + b + 1.0))
}

/// `|‖P_n^{(a,b)}‖|`, the square root of [`jacobi_norm_sq`].
pub fn jacobi_norm(n: u64, a: f64, b: f64) -> Result<f64> {
    jacobi_norm_sq(n, a, b).map(f64::sqrt)
}
