//! Orthogonal basis `𝒱_{l,μ}(x) P_n^{(β,l)}(2r²−1)` of the weighted space `L²_β` on the unit disk.

use std::collections::BTreeMap;
use std::f64::consts::{LN_2, PI};
use std::io::{BufRead, Write};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::specfun::{jacobi_eval, jacobi_norm_sq, GammaRatio};

/// Angular parity of a solid harmonic: `Cos` is μ = +1, `Sin` is μ = −1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Mu {
    Cos,
    Sin,
}

impl Mu {
    pub fn sign(self) -> f64 {
        match self {
            Mu::Cos => 1.0,
            Mu::Sin => -1.0,
        }
    }

    pub fn as_i8(self) -> i8 {
        match self {
            Mu::Cos => 1,
            Mu::Sin => -1,
        }
    }

    /// The partner parity μ* = −μ.
    pub fn conj(self) -> Mu {
        match self {
            Mu::Cos => Mu::Sin,
            Mu::Sin => Mu::Cos,
        }
    }

    pub fn from_sign(s: i64) -> Result<Mu> {
        match s {
            1 => Ok(Mu::Cos),
            -1 => Ok(Mu::Sin),
            _ => Err(Error::Mismatch(format!("mu must be +1 or -1, got {s}"))),
        }
    }
}

/// Basis address `(l, n, μ)`; `(0, n, Sin)` is never constructed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct BasisIndex {
    l: usize,
    n: usize,
    mu: Mu,
}

impl BasisIndex {
    pub fn new(l: usize, n: usize, mu: Mu) -> Result<Self> {
        if l == 0 && mu == Mu::Sin {
            return Err(Error::InvalidIndex { l: 0, n: n as i64, mu: -1 });
        }
        Ok(Self { l, n, mu })
    }

    /// Stencil target: `None` for negative indices or the excluded `(0, Sin)` harmonic.
    pub fn shifted(l: i64, n: i64, mu: Mu) -> Option<Self> {
        if l < 0 || n < 0 || (l == 0 && mu == Mu::Sin) {
            None
        } else {
            Some(Self { l: l as usize, n: n as usize, mu })
        }
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn mu(&self) -> Mu {
        self.mu
    }

    /// `((n+1)(n+l+1))^s`, the per-mode Sobolev weight.
    pub fn sobolev_weight(&self, s: f64) -> f64 {
        ((self.n as f64 + 1.0) * ((self.n + self.l) as f64 + 1.0)).powf(s)
    }
}

/// Rectangular index set `l ≤ l_max`, `n ≤ n_max`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Truncation {
    pub l_max: usize,
    pub n_max: usize,
}

impl Truncation {
    pub fn new(l_max: usize, n_max: usize) -> Self {
        Self { l_max, n_max }
    }

    pub fn dim(&self) -> usize {
        (self.l_max + 1) * (self.n_max + 1) * 2 - (self.n_max + 1)
    }

    pub fn contains(&self, idx: &BasisIndex) -> bool {
        idx.l <= self.l_max && idx.n <= self.n_max
    }

    pub fn grow(&self, dl: usize, dn: usize) -> Self {
        Self { l_max: self.l_max + dl, n_max: self.n_max + dn }
    }

    pub fn union(&self, other: &Truncation) -> Self {
        Self { l_max: self.l_max.max(other.l_max), n_max: self.n_max.max(other.n_max) }
    }

    /// Offset of `idx` in [`Truncation::modes`], if contained.
    pub fn position(&self, idx: &BasisIndex) -> Option<usize> {
        if !self.contains(idx) {
            return None;
        }
        let block = self.n_max + 1;
        if idx.l == 0 {
            return Some(idx.n);
        }
        let odd = usize::from(idx.mu == Mu::Sin);
        Some(block + (idx.l - 1) * 2 * block + 2 * idx.n + odd)
    }

    /// All indices in canonical (sorted) order.
    pub fn modes(&self) -> Vec<BasisIndex> {
        let mut out = Vec::with_capacity(self.dim());
        for l in 0..=self.l_max {
            for n in 0..=self.n_max {
                out.push(BasisIndex { l, n, mu: Mu::Cos });
                if l > 0 {
                    out.push(BasisIndex { l, n, mu: Mu::Sin });
                }
            }
        }
        out.sort();
        out
    }
}

/// A point of the closed disk in polar coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PolarPoint {
    pub r: f64,
    pub phi: f64,
}

impl PolarPoint {
    pub fn new(r: f64, phi: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&r) || !phi.is_finite() {
            return Err(Error::Domain { func: "PolarPoint", detail: format!("need 0 <= r <= 1, got r={r}, phi={phi}") });
        }
        Ok(Self { r, phi })
    }

    pub fn x(&self) -> f64 {
        self.r * self.phi.cos()
    }

    pub fn y(&self) -> f64 {
        self.r * self.phi.sin()
    }

    /// `ρ = 2r² − 1`.
    pub fn rho(&self) -> f64 {
        2.0 * self.r * self.r - 1.0
    }

    /// `ω = 1 − r²`.
    pub fn omega(&self) -> f64 {
        1.0 - self.r * self.r
    }
}

fn harmonic_unchecked(l: usize, mu: Mu, r: f64, phi: f64) -> f64 {
    if l == 0 {
        return 0.5;
    }
    let rl = r.powi(l as i32);
    let arg = l as f64 * phi;
    match mu {
        Mu::Cos => rl * arg.cos(),
        Mu::Sin => rl * arg.sin(),
    }
}

/// Solid harmonic `𝒱_{l,μ}`, with `𝒱_{0,+1} = 1/2`.
pub fn harmonic_eval(l: usize, mu: Mu, p: PolarPoint) -> Result<f64> {
    if l == 0 && mu == Mu::Sin {
        return Err(Error::InvalidIndex { l: 0, n: 0, mu: -1 });
    }
    Ok(harmonic_unchecked(l, mu, p.r, p.phi))
}

/// Basis function `𝒱_{l,μ} P_n^{(γ,l)}(ρ)` at a point.
pub fn basis_eval(idx: BasisIndex, gamma: f64, p: PolarPoint) -> Result<f64> {
    let radial = jacobi_eval(idx.n as i64, gamma, idx.l as f64, p.rho().clamp(-1.0, 1.0))?;
    Ok(harmonic_unchecked(idx.l, idx.mu, p.r, p.phi) * radial)
}

/// Values of every basis function of `trunc` at `p`, in canonical order.
pub fn fill_basis_row(p: PolarPoint, gamma: f64, trunc: Truncation, radial: &mut [f64], out: &mut [f64]) {
    let rho = p.rho().clamp(-1.0, 1.0);
    let block = trunc.n_max + 1;
    let mut rl = 1.0;
    for l in 0..=trunc.l_max {
        crate::specfun::jacobi_fill(gamma, l as f64, rho, &mut radial[..block]);
        if l == 0 {
            for n in 0..block {
                out[n] = 0.5 * radial[n];
            }
        } else {
            rl *= p.r;
            let (s, c) = (l as f64 * p.phi).sin_cos();
            let base = block + (l - 1) * 2 * block;
            for n in 0..block {
                out[base + 2 * n] = rl * c * radial[n];
                out[base + 2 * n + 1] = rl * s * radial[n];
            }
        }
    }
}

/// The angular constant: `π/2` for the constant harmonic, else `π`.
pub fn harmonic_const(l: usize) -> f64 {
    if l == 0 {
        PI / 2.0
    } else {
        PI
    }
}

/// Log of [`basis_norm_sq`]; finite even where the norm itself underflows.
pub fn ln_basis_norm_sq(idx: BasisIndex, beta: f64) -> Result<f64> {
    let l = idx.l as f64;
    let jn = jacobi_norm_sq(idx.n as u64, beta, l)?;
    let ln_jn = if jn > 0.0 && jn.is_finite() { jn.ln() } else { ln_jacobi_norm_sq(idx.n, beta, l)? };
    Ok(harmonic_const(idx.l).ln() - (beta + l + 2.0) * LN_2 + ln_jn)
}

fn ln_jacobi_norm_sq(n: usize, a: f64, b: f64) -> Result<f64> {
    let nf = n as f64;
    let scale = (a + b + 1.0) * LN_2;
    if n == 0 {
        return Ok(scale + GammaRatio::new(vec![a + 1.0, b + 1.0], vec![a + b + 2.0])?.ln());
    }
    let g = GammaRatio::new(vec![nf + a + 1.0, nf + b + 1.0], vec![nf + 1.0, nf + a + b + 1.0])?;
    Ok(scale + g.ln() - (2.0 * nf + a + b + 1.0).ln())
}

/// `‖𝒱_{l,μ}P_n^{(β,l)}‖²_{L²_β} = C_l 2^{−(β+l+2)} |‖P_n^{(β,l)}‖|²`.
pub fn basis_norm_sq(idx: BasisIndex, beta: f64) -> Result<f64> {
    Ok(ln_basis_norm_sq(idx, beta)?.exp())
}

fn rising_ratio(m: usize, num_shift: f64, den_shift: f64) -> f64 {
    (1..=m).map(|s| (num_shift + s as f64) / (den_shift + s as f64)).product()
}

/// `‖φ‖²_{γ+k} / ‖φ‖²_γ` for the same index.
pub fn norm_ratio_shift_weight(idx: BasisIndex, gamma: f64, k: usize) -> Result<f64> {
    if gamma <= -1.0 {
        return Err(Error::Domain { func: "norm_ratio_shift_weight", detail: format!("gamma must exceed -1, got {gamma}") });
    }
    let n = idx.n as f64;
    let l = idx.l as f64;
    let kf = k as f64;
    let base = 2.0 * n + gamma + l + 1.0;
    Ok(base / (base + kf) * rising_ratio(k, n + gamma, n + gamma + l))
}

/// `‖φ_{l+j,n+m}‖²_γ / ‖φ_{l,n}‖²_γ` (same μ).
pub fn norm_ratio_shift_index_up(idx: BasisIndex, gamma: f64, j: usize, m: usize) -> Result<f64> {
    if gamma <= -1.0 {
        return Err(Error::Domain { func: "norm_ratio_shift_index_up", detail: format!("gamma must exceed -1, got {gamma}") });
    }
    let n = idx.n as f64;
    let l = idx.l as f64;
    let c = harmonic_const(idx.l + j) / harmonic_const(idx.l);
    let base = 2.0 * n + gamma + l + 1.0;
    let tail = 2.0 * n + 2.0 * m as f64 + gamma + l + j as f64 + 1.0;
    Ok(c * base / tail * rising_ratio(m, n + gamma, n) * rising_ratio(m + j, n + l, n + gamma + l))
}

/// `‖φ_{l−j,n+m}‖²_γ / ‖φ_{l,n}‖²_γ` (same μ), requiring `m ≥ j` and a valid target.
pub fn norm_ratio_shift_index_down(idx: BasisIndex, gamma: f64, j: usize, m: usize) -> Result<f64> {
    if gamma <= -1.0 {
        return Err(Error::Domain { func: "norm_ratio_shift_index_down", detail: format!("gamma must exceed -1, got {gamma}") });
    }
    if j > idx.l || m < j || (idx.l == j && idx.mu == Mu::Sin) {
        return Err(Error::InvalidIndex { l: idx.l as i64 - j as i64, n: (idx.n + m) as i64, mu: idx.mu.as_i8() });
    }
    let n = idx.n as f64;
    let l = idx.l as f64;
    let c = harmonic_const(idx.l - j) / harmonic_const(idx.l);
    let base = 2.0 * n + gamma + l + 1.0;
    let tail = 2.0 * n + 2.0 * m as f64 + gamma + l - j as f64 + 1.0;
    Ok(c * base / tail * rising_ratio(m, n + gamma, n) * rising_ratio(m - j, n + l, n + gamma + l))
}

/// Finite expansion `ω^g Σ a_{l,n,μ} 𝒱_{l,μ} P_n^{(γ,l)}`.
///
/// Zero coefficients are not stored.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoeffVec {
    gamma: f64,
    prefactor: f64,
    trunc: Truncation,
    entries: BTreeMap<BasisIndex, f64>,
}

fn same_param(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * (1.0 + a.abs().max(b.abs()))
}

impl CoeffVec {
    /// Empty expansion with Jacobi parameter `gamma` and physical prefactor `ω^prefactor`.
    pub fn zeros(gamma: f64, prefactor: f64, trunc: Truncation) -> Result<Self> {
        if !(gamma > -1.0) || !gamma.is_finite() || !prefactor.is_finite() {
            return Err(Error::Domain { func: "CoeffVec", detail: format!("invalid gamma={gamma} or prefactor={prefactor}") });
        }
        Ok(Self { gamma, prefactor, trunc, entries: BTreeMap::new() })
    }

    pub fn from_entries(
        gamma: f64,
        prefactor: f64,
        trunc: Truncation,
        entries: impl IntoIterator<Item = (BasisIndex, f64)>,
    ) -> Result<Self> {
        let mut v = Self::zeros(gamma, prefactor, trunc)?;
        for (idx, a) in entries {
            v.add_to(idx, a)?;
        }
        Ok(v)
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn prefactor(&self) -> f64 {
        self.prefactor
    }

    pub fn truncation(&self) -> Truncation {
        self.trunc
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, idx: &BasisIndex) -> f64 {
        self.entries.get(idx).copied().unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&BasisIndex, &f64)> {
        self.entries.iter()
    }

    fn check_entry(&self, idx: &BasisIndex, a: f64) -> Result<()> {
        if !a.is_finite() {
            return Err(Error::NonFinite(format!("coefficient at {idx:?}")));
        }
        if !self.trunc.contains(idx) {
            return Err(Error::Mismatch(format!("{idx:?} lies outside truncation {:?}", self.trunc)));
        }
        Ok(())
    }

    /// Overwrite one coefficient.
    pub fn set(&mut self, idx: BasisIndex, a: f64) -> Result<()> {
        self.check_entry(&idx, a)?;
        if a == 0.0 {
            self.entries.remove(&idx);
        } else {
            self.entries.insert(idx, a);
        }
        Ok(())
    }

    /// Accumulate into one coefficient.
    pub fn add_to(&mut self, idx: BasisIndex, a: f64) -> Result<()> {
        let v = self.get(&idx) + a;
        self.set(idx, v)
    }

    pub(crate) fn prune(&mut self) {
        self.entries.retain(|_, v| *v != 0.0);
    }

    pub(crate) fn add_unchecked(&mut self, idx: BasisIndex, a: f64) {
        if a != 0.0 {
            *self.entries.entry(idx).or_insert(0.0) += a;
        }
    }

    pub fn is_combinable(&self, other: &CoeffVec) -> bool {
        same_param(self.gamma, other.gamma) && same_param(self.prefactor, other.prefactor)
    }

    fn require_combinable(&self, other: &CoeffVec) -> Result<()> {
        if self.is_combinable(other) {
            Ok(())
        } else {
            Err(Error::Mismatch(format!(
                "expansions differ: (gamma {}, prefactor {}) vs (gamma {}, prefactor {})",
                self.gamma, self.prefactor, other.gamma, other.prefactor
            )))
        }
    }

    /// `self + c·other`; the truncation becomes the union of both.
    pub fn axpy(&self, c: f64, other: &CoeffVec) -> Result<CoeffVec> {
        self.require_combinable(other)?;
        let mut out = self.clone();
        out.trunc = self.trunc.union(&other.trunc);
        for (idx, a) in &other.entries {
            out.add_unchecked(*idx, c * a);
        }
        out.entries.retain(|_, v| *v != 0.0);
        Ok(out)
    }

    pub fn add(&self, other: &CoeffVec) -> Result<CoeffVec> {
        self.axpy(1.0, other)
    }

    pub fn sub(&self, other: &CoeffVec) -> Result<CoeffVec> {
        self.axpy(-1.0, other)
    }

    pub fn scale(&self, c: f64) -> CoeffVec {
        let mut out = self.clone();
        for v in out.entries.values_mut() {
            *v *= c;
        }
        out.entries.retain(|_, v| *v != 0.0);
        out
    }

    /// Apply a per-mode multiplier.
    pub fn map_modes(&self, mut f: impl FnMut(&BasisIndex) -> f64) -> CoeffVec {
        let mut out = self.clone();
        for (idx, v) in out.entries.iter_mut() {
            *v *= f(idx);
        }
        out.entries.retain(|_, v| *v != 0.0);
        out
    }

    /// Weighted pairing `Σ a_i b_i ((n+1)(n+l+1))^s ‖φ_i‖²_γ`.
    pub fn inner(&self, other: &CoeffVec, s: f64) -> Result<f64> {
        self.require_combinable(other)?;
        let mut sum = 0.0;
        for (idx, a) in &self.entries {
            if let Some(b) = other.entries.get(idx) {
                sum += a * b * idx.sobolev_weight(s) * basis_norm_sq(*idx, self.gamma)?;
            }
        }
        Ok(sum)
    }

    /// Largest absolute coefficient difference over the union of supports.
    pub fn max_abs_diff(&self, other: &CoeffVec) -> Result<f64> {
        let d = self.sub(other)?;
        Ok(d.entries.values().fold(0.0, |m, v| m.max(v.abs())))
    }

    /// Dense coefficients in the order of `modes`.
    pub fn to_dense(&self, modes: &[BasisIndex]) -> Vec<f64> {
        modes.iter().map(|m| self.get(m)).collect()
    }

    pub fn from_dense(gamma: f64, prefactor: f64, trunc: Truncation, modes: &[BasisIndex], values: &[f64]) -> Result<Self> {
        Self::from_entries(gamma, prefactor, trunc, modes.iter().copied().zip(values.iter().copied()))
    }

    /// Evaluate the physical function `ω^g Σ a φ` at a point.
    pub fn eval(&self, p: PolarPoint) -> f64 {
        if self.prefactor > 0.0 && p.r >= 1.0 {
            return 0.0;
        }
        let rho = p.rho().clamp(-1.0, 1.0);
        let mut sum = 0.0;
        let mut radial = vec![0.0; self.trunc.n_max + 1];
        let mut current_l = usize::MAX;
        for (idx, a) in &self.entries {
            if idx.l != current_l {
                current_l = idx.l;
                crate::specfun::jacobi_fill(self.gamma, idx.l as f64, rho, &mut radial);
            }
            sum += a * harmonic_unchecked(idx.l, idx.mu, p.r, p.phi) * radial[idx.n];
        }
        if self.prefactor != 0.0 {
            sum *= p.omega().powf(self.prefactor);
        }
        sum
    }
}

/// `(Σ ((n+1)(n+l+1))^s a² ‖φ‖²_γ)^{1/2}`; negative `s` gives the dual norm.
pub fn sobolev_norm(c: &CoeffVec, s: f64) -> f64 {
    sobolev_norm_sq(c, s).sqrt()
}

pub fn sobolev_norm_sq(c: &CoeffVec, s: f64) -> f64 {
    c.entries
        .iter()
        .map(|(idx, a)| {
            let w = (ln_basis_norm_sq(*idx, c.gamma).expect("gamma validated at construction") + s * idx.sobolev_weight(1.0).ln()).exp();
            a * a * w
        })
        .sum()
}

/// Vector field with both components in the same expansion.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VecCoeffField {
    pub x: CoeffVec,
    pub y: CoeffVec,
}

impl VecCoeffField {
    pub fn new(x: CoeffVec, y: CoeffVec) -> Result<Self> {
        if !x.is_combinable(&y) || x.trunc != y.trunc {
            return Err(Error::Mismatch("vector components must share expansion and truncation".into()));
        }
        Ok(Self { x, y })
    }

    pub fn gamma(&self) -> f64 {
        self.x.gamma
    }

    pub fn prefactor(&self) -> f64 {
        self.x.prefactor
    }

    pub fn truncation(&self) -> Truncation {
        self.x.trunc
    }

    pub fn sub(&self, other: &VecCoeffField) -> Result<VecCoeffField> {
        VecCoeffField::new(self.x.sub(&other.x)?, self.y.sub(&other.y)?)
    }

    pub fn norm_sq(&self, s: f64) -> f64 {
        sobolev_norm_sq(&self.x, s) + sobolev_norm_sq(&self.y, s)
    }

    pub fn norm(&self, s: f64) -> f64 {
        self.norm_sq(s).sqrt()
    }
}

/// Write `l,n,mu,coefficient` rows preceded by a `#` header with the expansion parameters.
pub fn write_table<W: Write>(mut w: W, c: &CoeffVec, alpha: f64) -> std::io::Result<()> {
    writeln!(
        w,
        "# gamma={:e} prefactor={:e} alpha={:e} l_max={} n_max={}",
        c.gamma, c.prefactor, alpha, c.trunc.l_max, c.trunc.n_max
    )?;
    writeln!(w, "l,n,mu,coefficient")?;
    for (idx, a) in &c.entries {
        writeln!(w, "{},{},{},{:e}", idx.l, idx.n, idx.mu.as_i8(), a)?;
    }
    Ok(())
}

/// Parse a table written by [`write_table`]. Returns the expansion and the recorded `alpha`.
pub fn read_table<R: BufRead>(r: R) -> Result<(CoeffVec, f64)> {
    let mut header: BTreeMap<String, String> = BTreeMap::new();
    let mut rows = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let lineno = i + 1;
        let line = line.map_err(|e| Error::Parse { line: lineno, detail: e.to_string() })?;
        let t = line.trim();
        if t.is_empty() || t == "l,n,mu,coefficient" {
            continue;
        }
        if let Some(rest) = t.strip_prefix('#') {
            for tok in rest.split_whitespace() {
                if let Some((k, v)) = tok.split_once('=') {
                    header.entry(k.to_string()).or_insert_with(|| v.to_string());
                }
            }
            continue;
        }
        let parts: Vec<&str> = t.split(',').map(str::trim).collect();
        if parts.len() != 4 {
            return Err(Error::Parse { line: lineno, detail: format!("expected 4 fields, found {}", parts.len()) });
        }
        let bad = |what: &str| Error::Parse { line: lineno, detail: format!("cannot parse {what}") };
        let l: usize = parts[0].parse().map_err(|_| bad("l"))?;
        let n: usize = parts[1].parse().map_err(|_| bad("n"))?;
        let mu: i64 = parts[2].trim_start_matches('+').parse().map_err(|_| bad("mu"))?;
        let a: f64 = parts[3].parse().map_err(|_| bad("coefficient"))?;
        let mu = Mu::from_sign(mu).map_err(|e| Error::Parse { line: lineno, detail: e.to_string() })?;
        let idx = BasisIndex::new(l, n, mu).map_err(|e| Error::Parse { line: lineno, detail: e.to_string() })?;
        rows.push((lineno, idx, a));
    }
    let key = |k: &str| -> Result<&String> {
        header.get(k).ok_or_else(|| Error::Parse { line: 1, detail: format!("header is missing `{k}`") })
    };
    let num = |k: &str| -> Result<f64> {
        key(k)?.parse().map_err(|_| Error::Parse { line: 1, detail: format!("header field `{k}` is not a number") })
    };
    let int = |k: &str| -> Result<usize> {
        key(k)?.parse().map_err(|_| Error::Parse { line: 1, detail: format!("header field `{k}` is not an integer") })
    };
    let trunc = Truncation::new(int("l_max")?, int("n_max")?);
    let mut c = CoeffVec::zeros(num("gamma")?, num("prefactor")?, trunc)?;
    for (lineno, idx, a) in rows {
        c.add_to(idx, a).map_err(|e| Error::Parse { line: lineno, detail: e.to_string() })?;
    }
    Ok((c, num("alpha")?))
}
