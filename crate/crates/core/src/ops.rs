//! Coefficient-space actions of the gradient, the Riesz potential `(−Δ)^{(α−2)/2}`, the
//! fractional Laplacian eigenvalues and the test-function map.
//!
//! Stencils push each source mode onto at most two targets per component. A target with
//! `l = 0` carries an extra factor 2: the constant harmonic is stored as `𝒱_{0,+1} = 1/2`, so
//! writing a field's constant part in that basis doubles its coefficient. For a source
//! `(l, n, μ)` with `s = sign(μ)`, the x-component keeps parity `μ` and the y-component uses
//! the partner parity `μ*` with weights `s·up` and `−s·down`:
//!
//! | operator      | up target        | up weight       | down target      | down weight  |
//! |---------------|------------------|-----------------|------------------|--------------|
//! | weighted grad | `(l+1, n)`       | `−(n+γ)`        | `(l−1, n+1)`     | `−(n+1)`     |
//! | Riesz grad    | `(l+1, n)`       | `C(n+α/2+l)`    | `(l−1, n+1)`     | `C(n+l+1)`   |
//! | plain grad    | `(l+1, n−1)`     | `n+γ+l+1`       | `(l−1, n)`       | `n+l`        |
//!
//! with `C = −2^{α−2}Γ(n+1+α/2)Γ(n+α/2+l)/(Γ(n+1)Γ(n+l+2))`.

use crate::basis::{basis_norm_sq, BasisIndex, CoeffVec, Truncation, VecCoeffField};
use crate::error::{domain, Error, Result};
use crate::specfun::GammaRatio;

/// Exponent data for the Riesz action.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatorContext {
    alpha: f64,
    s_shift: i64,
}

impl OperatorContext {
    pub fn new(alpha: f64, s_shift: i64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 2.0) {
            return Err(domain("OperatorContext", format!("alpha must lie in (0, 2], got {alpha}")));
        }
        if alpha / 2.0 - s_shift as f64 <= -1.0 {
            return Err(domain("OperatorContext", format!("need alpha/2 - s > -1, got alpha={alpha}, s={s_shift}")));
        }
        Ok(Self { alpha, s_shift })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn s_shift(&self) -> i64 {
        self.s_shift
    }

    /// Jacobi parameter of inputs: `α/2 − s`.
    pub fn source_gamma(&self) -> f64 {
        self.alpha / 2.0 - self.s_shift as f64
    }

    /// Jacobi parameter of outputs: `α/2 − 2 + s`.
    pub fn target_gamma(&self) -> f64 {
        self.alpha / 2.0 - 2.0 + self.s_shift as f64
    }
}

fn check_alpha(func: &'static str, alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha <= 2.0) {
        return Err(domain(func, format!("alpha must lie in (0, 2], got {alpha}")));
    }
    Ok(())
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * (1.0 + a.abs().max(b.abs()))
}

fn require_repr(func: &str, v: &CoeffVec, gamma: f64, prefactor: f64) -> Result<()> {
    if close(v.gamma(), gamma) && close(v.prefactor(), prefactor) {
        Ok(())
    } else {
        Err(Error::Mismatch(format!(
            "{func}: expected gamma={gamma}, prefactor={prefactor}; got gamma={}, prefactor={}",
            v.gamma(),
            v.prefactor()
        )))
    }
}

/// `λ_{l,n} = 2^α Γ(n+1+α/2)Γ(n+l+1+α/2) / (Γ(n+1)Γ(n+l+1))`.
pub fn frac_laplacian_eigenvalue(idx: BasisIndex, alpha: f64) -> Result<f64> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(domain("frac_laplacian_eigenvalue", format!("alpha must be positive, got {alpha}")));
    }
    let n = idx.n() as f64;
    let l = idx.l() as f64;
    let h = alpha / 2.0;
    let g = GammaRatio::new(vec![n + 1.0 + h, n + l + 1.0 + h], vec![n + 1.0, n + l + 1.0])?;
    Ok((alpha * std::f64::consts::LN_2 + g.ln()).exp())
}

/// Riesz action on `ω^{α/2−s}𝒱P_n^{(α/2−s,l)}`: the target `(l, n+1−s, μ)` and its factor.
///
/// Returns `None` when the target radial index is negative (the image vanishes).
pub fn riesz_scalar(idx: BasisIndex, alpha: f64, s: i64) -> Result<Option<(BasisIndex, f64)>> {
    let ctx = OperatorContext::new(alpha, s)?;
    let target_n = idx.n() as i64 + 1 - s;
    let Some(target) = BasisIndex::shifted(idx.l() as i64, target_n, idx.mu()) else {
        return Ok(None);
    };
    Ok(Some((target, riesz_factor(idx, ctx)?)))
}

fn riesz_factor(idx: BasisIndex, ctx: OperatorContext) -> Result<f64> {
    let n = idx.n() as f64;
    let l = idx.l() as f64;
    let s = ctx.s_shift as f64;
    let h = ctx.alpha / 2.0;
    let g = GammaRatio::new(vec![n + 1.0 - s + h, n + l + h], vec![n + 1.0, n + l + 2.0 - s])?;
    let sign = if (1 - ctx.s_shift).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    Ok(sign * ((ctx.alpha - 2.0) * std::f64::consts::LN_2 + g.ln()).exp())
}

/// Apply the Riesz action to a whole expansion in `ω^{α/2−s} ⊗ P^{(α/2−s,l)}`.
pub fn riesz_apply(v: &CoeffVec, alpha: f64, s: i64) -> Result<CoeffVec> {
    let ctx = OperatorContext::new(alpha, s)?;
    require_repr("riesz_apply", v, ctx.source_gamma(), ctx.source_gamma())?;
    let t = v.truncation();
    let n_max = (t.n_max as i64 + 1 - s).max(t.n_max as i64) as usize;
    let mut out = CoeffVec::zeros(ctx.target_gamma(), 0.0, Truncation::new(t.l_max, n_max))?;
    for (idx, a) in v.iter() {
        if let Some((target, f)) = riesz_scalar(*idx, alpha, s)? {
            out.add_unchecked(target, f * a);
        }
    }
    Ok(out)
}

/// Factor for stencil targets landing on the constant harmonic.
fn constant_target(l: i64) -> f64 {
    if l == 0 {
        2.0
    } else {
        1.0
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub(crate) enum Comp {
    X,
    Y,
}

/// Push a two-target stencil: `up` goes to `(l+1, n+up_dn)` and `down` to `(l−1, n+down_dn)`.
/// The y-component reuses both weights with signs `+s` and `−s` on the partner parity.
fn push_stencil(
    idx: BasisIndex,
    a: f64,
    (up, up_dn): (f64, i64),
    (down, down_dn): (f64, i64),
    emit: &mut impl FnMut(Comp, BasisIndex, f64),
) {
    let l = idx.l() as i64;
    let n = idx.n() as i64;
    let mu = idx.mu();
    let s = mu.sign();
    let down_scale = constant_target(l - 1);
    if let Some(t) = BasisIndex::shifted(l + 1, n + up_dn, mu) {
        emit(Comp::X, t, up * a);
    }
    if let Some(t) = BasisIndex::shifted(l - 1, n + down_dn, mu) {
        emit(Comp::X, t, down_scale * down * a);
    }
    if let Some(t) = BasisIndex::shifted(l + 1, n + up_dn, mu.conj()) {
        emit(Comp::Y, t, s * up * a);
    }
    if let Some(t) = BasisIndex::shifted(l - 1, n + down_dn, mu.conj()) {
        emit(Comp::Y, t, -s * down_scale * down * a);
    }
}

pub(crate) fn grad_weighted_terms(idx: BasisIndex, a: f64, gamma: f64, emit: &mut impl FnMut(Comp, BasisIndex, f64)) {
    let n = idx.n() as f64;
    push_stencil(idx, a, (-(n + gamma), 0), (-(n + 1.0), 1), emit);
}

pub(crate) fn riesz_grad_terms(idx: BasisIndex, b: f64, alpha: f64, emit: &mut impl FnMut(Comp, BasisIndex, f64)) -> Result<()> {
    let n = idx.n() as f64;
    let l = idx.l() as f64;
    let h = alpha / 2.0;
    let g = GammaRatio::new(vec![n + 1.0 + h, n + h + l], vec![n + 1.0, n + 2.0 + l])?;
    let c = -((alpha - 2.0) * std::f64::consts::LN_2 + g.ln()).exp();
    push_stencil(idx, b, (c * (n + h + l), 0), (c * (n + l + 1.0), 1), emit);
    Ok(())
}

fn grad_unweighted_terms(idx: BasisIndex, a: f64, gamma: f64, emit: &mut impl FnMut(Comp, BasisIndex, f64)) {
    let n = idx.n() as f64;
    let l = idx.l() as f64;
    push_stencil(idx, a, (n + gamma + l + 1.0, -1), (n + l, 0), emit);
}

fn collect(
    source: &CoeffVec,
    gamma: f64,
    prefactor: f64,
    trunc: Truncation,
    mut terms: impl FnMut(BasisIndex, f64, &mut dyn FnMut(Comp, BasisIndex, f64)) -> Result<()>,
) -> Result<VecCoeffField> {
    let mut x = CoeffVec::zeros(gamma, prefactor, trunc)?;
    let mut y = CoeffVec::zeros(gamma, prefactor, trunc)?;
    for (idx, a) in source.iter() {
        let mut emit = |c: Comp, t: BasisIndex, v: f64| match c {
            Comp::X => x.add_unchecked(t, v),
            Comp::Y => y.add_unchecked(t, v),
        };
        terms(*idx, *a, &mut emit)?;
    }
    x.prune();
    y.prune();
    VecCoeffField::new(x, y)
}

/// `∇(ω^γ u) = ω^{γ−1} U` for `u` in `ω^γ ⊗ P^{(γ,l)}`; the output lives in `P^{(γ−1,l)}`.
pub fn grad_weighted(u: &CoeffVec) -> Result<VecCoeffField> {
    let gamma = u.gamma();
    if !(gamma > 0.0) {
        return Err(Error::Mismatch(format!("grad_weighted needs gamma > 0, got {gamma}")));
    }
    require_repr("grad_weighted", u, gamma, gamma)?;
    collect(u, gamma - 1.0, gamma - 1.0, u.truncation().grow(1, 1), |idx, a, emit| {
        grad_weighted_terms(idx, a, gamma, &mut |c, t, v| emit(c, t, v));
        Ok(())
    })
}

/// `(−Δ)^{(α−2)/2}∇(ω^{α/2} v)` for `v` in `ω^{α/2} ⊗ P^{(α/2,l)}`; output in `P^{(α/2−1,l)}`.
pub fn riesz_grad(v: &CoeffVec, alpha: f64) -> Result<VecCoeffField> {
    check_alpha("riesz_grad", alpha)?;
    require_repr("riesz_grad", v, alpha / 2.0, alpha / 2.0)?;
    collect(v, alpha / 2.0 - 1.0, 0.0, v.truncation().grow(1, 1), |idx, b, emit| {
        riesz_grad_terms(idx, b, alpha, &mut |c, t, x| emit(c, t, x))
    })
}

/// `∇p` for `p` in `P^{(γ,l)}` without prefactor; output in `P^{(γ+1,l)}`.
pub fn grad_unweighted(p: &CoeffVec) -> Result<VecCoeffField> {
    let gamma = p.gamma();
    require_repr("grad_unweighted", p, gamma, 0.0)?;
    collect(p, gamma + 1.0, 0.0, p.truncation().grow(1, 1), |idx, a, emit| {
        grad_unweighted_terms(idx, a, gamma, &mut |c, t, v| emit(c, t, v));
        Ok(())
    })
}

/// Per-mode multiplier of the test-function map.
pub fn test_map_factor(idx: BasisIndex, alpha: f64, s_weight: f64) -> Result<f64> {
    check_alpha("test_map", alpha)?;
    let n = idx.n() as f64;
    let l = idx.l() as f64;
    let h = alpha / 2.0;
    let g = GammaRatio::new(vec![n + 1.0, n + l + 1.0], vec![n + 1.0 + h, n + l + h])?;
    let base = ((2.0 - alpha) * std::f64::consts::LN_2 + g.ln()).exp() * (n + 1.0);
    Ok(base * idx.sobolev_weight(s_weight))
}

/// Test-function map: scales each coefficient of `u` (in `ω^{α/2} ⊗ P^{(α/2,l)}`).
pub fn test_map(u: &CoeffVec, alpha: f64, s_weight: f64) -> Result<CoeffVec> {
    check_alpha("test_map", alpha)?;
    require_repr("test_map", u, alpha / 2.0, alpha / 2.0)?;
    let mut out = u.clone();
    for (idx, a) in u.iter() {
        out.set(*idx, a * test_map_factor(*idx, alpha, s_weight)?)?;
    }
    Ok(out)
}

/// `W = U − V`, compared as elements of the same weighted `L²` space (prefactors dropped).
pub fn w_residual(u: &VecCoeffField, v: &VecCoeffField) -> Result<VecCoeffField> {
    if !close(u.gamma(), v.gamma()) {
        return Err(Error::Mismatch(format!("w_residual: gamma {} vs {}", u.gamma(), v.gamma())));
    }
    let t = u.truncation().union(&v.truncation());
    let lift = |c: &CoeffVec| CoeffVec::from_entries(c.gamma(), 0.0, t, c.iter().map(|(i, a)| (*i, *a)));
    let uu = VecCoeffField::new(lift(&u.x)?, lift(&u.y)?)?;
    let vv = VecCoeffField::new(lift(&v.x)?, lift(&v.y)?)?;
    uu.sub(&vv)
}

/// Constant symmetric 2×2 matrix `[[k11, k12], [k12, k22]]`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct Sym2 {
    pub k11: f64,
    pub k12: f64,
    pub k22: f64,
}

impl Sym2 {
    pub const IDENTITY: Sym2 = Sym2 { k11: 1.0, k12: 0.0, k22: 1.0 };

    pub fn new(k11: f64, k12: f64, k22: f64) -> Self {
        Self { k11, k12, k22 }
    }

    pub fn scaled(c: f64) -> Self {
        Self { k11: c, k12: 0.0, k22: c }
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> (f64, f64) {
        let m = 0.5 * (self.k11 + self.k22);
        let d = (0.25 * (self.k11 - self.k22).powi(2) + self.k12 * self.k12).sqrt();
        (m - d, m + d)
    }
}

/// `∫ ω^{γ} (K U)·V` for constant `K`, with `U`, `V` in the same `P^{(γ,l)}` expansion.
pub fn pair_constant_k(k: Sym2, u: &VecCoeffField, v: &VecCoeffField) -> Result<f64> {
    if !close(u.gamma(), v.gamma()) {
        return Err(Error::Mismatch(format!("pair_constant_k: gamma {} vs {}", u.gamma(), v.gamma())));
    }
    let gamma = u.gamma();
    let mut sum = 0.0;
    let mut add = |a: &CoeffVec, b: &CoeffVec, w: f64| -> Result<()> {
        if w == 0.0 {
            return Ok(());
        }
        for (idx, x) in a.iter() {
            let y = b.get(idx);
            if y != 0.0 {
                sum += w * x * y * basis_norm_sq(*idx, gamma)?;
            }
        }
        Ok(())
    };
    add(&u.x, &v.x, k.k11)?;
    add(&u.x, &v.y, k.k12)?;
    add(&u.y, &v.x, k.k12)?;
    add(&u.y, &v.y, k.k22)?;
    Ok(sum)
}

/// Single basis mode as an expansion.
pub fn unit_mode(idx: BasisIndex, gamma: f64, prefactor: f64, trunc: Truncation) -> Result<CoeffVec> {
    CoeffVec::from_entries(gamma, prefactor, trunc, [(idx, 1.0)])
}
