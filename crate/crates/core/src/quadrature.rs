//! Gauss–Jacobi × trapezoid quadrature on the disk, projections, diffusivity fields and
//! weighted Gram integrals.
//!
//! In the variable `ρ = 2r² − 1`,
//! `∫_Ω ω^β F dx = 2^{−β}/4 ∫_0^{2π} ∫_{−1}^{1} (1−ρ)^β F dρ dφ`,
//! so the boundary weight is absorbed by a Gauss–Jacobi rule with parameters `(β, 0)`.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::{DMatrix, SymmetricEigen};
use rayon::prelude::*;

use crate::basis::{basis_norm_sq, fill_basis_row, CoeffVec, PolarPoint, Truncation, VecCoeffField};
use crate::error::{domain, Error, Result};
use crate::ops::Sym2;
use crate::specfun::{jacobi_fill, jacobi_norm_sq};

/// Nodes and weights on `(−1, 1)` for the weight `(1−t)^a (1+t)^b`, nodes ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussJacobiRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub a: f64,
    pub b: f64,
}

impl GaussJacobiRule {
    /// `Σ w_i g(t_i)`.
    pub fn integrate(&self, g: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&t, &w)| w * g(t)).sum()
    }
}

/// Golub–Welsch eigen-decomposition followed by Newton polishing and Christoffel weights.
pub fn gauss_jacobi_rule(m: usize, a: f64, b: f64) -> Result<GaussJacobiRule> {
    if m == 0 {
        return Err(domain("gauss_jacobi_rule", "need at least one node"));
    }
    if !(a > -1.0 && b > -1.0) {
        return Err(domain("gauss_jacobi_rule", format!("parameters must exceed -1, got a={a}, b={b}")));
    }
    let ab = a + b;
    let mut jac = DMatrix::<f64>::zeros(m, m);
    for k in 0..m {
        let kf = k as f64;
        jac[(k, k)] = if k == 0 {
            (b - a) / (ab + 2.0)
        } else {
            (b * b - a * a) / ((2.0 * kf + ab) * (2.0 * kf + ab + 2.0))
        };
        if k + 1 < m {
            let j = kf + 1.0;
            let c = 2.0 * j + ab;
            let beta = if k == 0 {
                4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + ab).powi(2) * (3.0 + ab))
            } else {
                4.0 * j * (j + a) * (j + b) * (j + ab) / (c * c * (c + 1.0) * (c - 1.0))
            };
            jac[(k, k + 1)] = beta.sqrt();
            jac[(k + 1, k)] = beta.sqrt();
        }
    }
    let mut nodes: Vec<f64> = SymmetricEigen::new(jac).eigenvalues.iter().copied().collect();
    nodes.sort_by(|x, y| x.total_cmp(y));

    let mut vals = vec![0.0; m + 1];
    let mut deriv = vec![0.0; m];
    for t in nodes.iter_mut() {
        for _ in 0..3 {
            jacobi_fill(a, b, *t, &mut vals);
            jacobi_fill(a + 1.0, b + 1.0, *t, &mut deriv);
            let dp = 0.5 * (m as f64 + ab + 1.0) * deriv[m - 1];
            if dp == 0.0 {
                break;
            }
            let step = vals[m] / dp;
            *t = (*t - step).clamp(-1.0, 1.0);
            if step.abs() < 1e-16 {
                break;
            }
        }
    }
    let h: Vec<f64> = (0..m).map(|k| jacobi_norm_sq(k as u64, a, b)).collect::<Result<_>>()?;
    let weights = nodes
        .iter()
        .map(|&t| {
            jacobi_fill(a, b, t, &mut vals[..m]);
            1.0 / vals[..m].iter().zip(&h).map(|(p, hk)| p * p / hk).sum::<f64>()
        })
        .collect();
    Ok(GaussJacobiRule { nodes, weights, a, b })
}

/// Tensor rule on the disk for the weight `ω^β`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiskRule {
    pub beta: f64,
    pub radial: GaussJacobiRule,
    pub n_phi: usize,
}

impl DiskRule {
    pub fn new(radial_m: usize, n_phi: usize, beta: f64) -> Result<Self> {
        if n_phi == 0 {
            return Err(domain("DiskRule", "need at least one angular node"));
        }
        Ok(Self { beta, radial: gauss_jacobi_rule(radial_m, beta, 0.0)?, n_phi })
    }

    /// Default resolution for products of two expansions on `trunc`, plus a margin.
    pub fn for_truncation(trunc: Truncation, beta: f64, margin: usize) -> Result<Self> {
        Self::new(trunc.n_max + trunc.l_max + 8 + margin, 2 * trunc.l_max + 8 + margin, beta)
    }

    /// Points with their full weights, radial-major.
    pub fn points(&self) -> Vec<(PolarPoint, f64)> {
        let scale = 2f64.powf(-self.beta) / 4.0 * 2.0 * PI / self.n_phi as f64;
        let mut out = Vec::with_capacity(self.radial.nodes.len() * self.n_phi);
        for (&rho, &w) in self.radial.nodes.iter().zip(&self.radial.weights) {
            let r = (0.5 * (1.0 + rho)).max(0.0).sqrt().min(1.0);
            for j in 0..self.n_phi {
                let phi = 2.0 * PI * j as f64 / self.n_phi as f64;
                out.push((PolarPoint { r, phi }, w * scale));
            }
        }
        out
    }

    /// `∫_Ω ω^β F`.
    pub fn integrate(&self, f: impl Fn(PolarPoint) -> f64) -> f64 {
        self.points().into_iter().map(|(p, w)| w * f(p)).sum()
    }
}

/// A scalar function on the closed disk.
pub trait ScalarField: Send + Sync {
    fn eval(&self, p: PolarPoint) -> f64;
}

impl<F: Fn(PolarPoint) -> f64 + Send + Sync> ScalarField for F {
    fn eval(&self, p: PolarPoint) -> f64 {
        self(p)
    }
}

/// A symmetric 2×2 matrix field on the closed disk.
pub trait TensorField: Send + Sync {
    fn eval(&self, p: PolarPoint) -> Sym2;

    /// `Some` when the field does not depend on the point.
    fn constant(&self) -> Option<Sym2> {
        None
    }
}

impl<F: Fn(PolarPoint) -> Sym2 + Send + Sync> TensorField for F {
    fn eval(&self, p: PolarPoint) -> Sym2 {
        self(p)
    }
}

/// Spatially constant diffusivity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantField(pub Sym2);

impl TensorField for ConstantField {
    fn eval(&self, _: PolarPoint) -> Sym2 {
        self.0
    }

    fn constant(&self) -> Option<Sym2> {
        Some(self.0)
    }
}

/// Points of the closed disk used for sampled diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleGrid {
    pub points: Vec<PolarPoint>,
}

impl SampleGrid {
    /// `n_r` radii from 0 to 1 inclusive times `n_phi` equispaced angles.
    pub fn polar(n_r: usize, n_phi: usize) -> Result<Self> {
        if n_r < 2 || n_phi == 0 {
            return Err(domain("SampleGrid", format!("need n_r >= 2 and n_phi >= 1, got {n_r}, {n_phi}")));
        }
        let mut points = Vec::with_capacity(n_r * n_phi);
        for i in 0..n_r {
            let r = i as f64 / (n_r - 1) as f64;
            for j in 0..n_phi {
                points.push(PolarPoint { r, phi: 2.0 * PI * j as f64 / n_phi as f64 });
            }
        }
        Ok(Self { points })
    }
}

impl Default for SampleGrid {
    fn default() -> Self {
        Self::polar(41, 64).expect("static grid parameters")
    }
}

/// `√(α(2+α))/(2−α)`; the largest admissible `λ_max/λ_min`.
pub fn wellposed_limit(alpha: f64) -> f64 {
    if alpha >= 2.0 {
        f64::INFINITY
    } else {
        (alpha * (2.0 + alpha)).sqrt() / (2.0 - alpha)
    }
}

/// Sampled spectral bounds of a diffusivity.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct SpdReport {
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub wellposed: bool,
}

/// Extreme eigenvalues of `K` over the grid; fails on a non-positive-definite sample.
pub fn spd_check(k: &dyn TensorField, alpha: f64, grid: &SampleGrid) -> Result<SpdReport> {
    if grid.points.is_empty() {
        return Err(domain("spd_check", "empty sample grid"));
    }
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &p in &grid.points {
        let m = k.eval(p);
        let (a, b) = m.eigenvalues();
        if !a.is_finite() || !b.is_finite() {
            return Err(Error::NonFinite(format!("diffusivity at r={}, phi={}", p.r, p.phi)));
        }
        if a <= 0.0 {
            return Err(Error::NotSpd { r: p.r, phi: p.phi, lambda: a });
        }
        lo = lo.min(a);
        hi = hi.max(b);
    }
    Ok(SpdReport { lambda_min: lo, lambda_max: hi, wellposed: hi / lo < wellposed_limit(alpha) })
}

/// Largest `|k|` over the grid.
pub fn winf_norm_estimate(k: &dyn ScalarField, grid: &SampleGrid) -> Result<f64> {
    let mut m: f64 = 0.0;
    for &p in &grid.points {
        let v = k.eval(p);
        if !v.is_finite() {
            return Err(Error::NonFinite(format!("scalar field at r={}, phi={}", p.r, p.phi)));
        }
        m = m.max(v.abs());
    }
    Ok(m)
}

/// Diffusivity with its sampled bounds and well-posedness flag.
#[derive(Clone)]
pub struct DiffusivitySpec {
    field: Arc<dyn TensorField>,
    report: SpdReport,
}

impl std::fmt::Debug for DiffusivitySpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DiffusivitySpec")
            .field("constant", &self.field.constant())
            .field("report", &self.report)
            .finish()
    }
}

impl DiffusivitySpec {
    /// Sample `field` on `grid` and record its bounds.
    pub fn new(field: impl TensorField + 'static, alpha: f64, grid: &SampleGrid) -> Result<Self> {
        let field: Arc<dyn TensorField> = Arc::new(field);
        let report = match field.constant() {
            Some(k) => spd_check(&ConstantField(k), alpha, &SampleGrid { points: vec![PolarPoint { r: 0.0, phi: 0.0 }] })?,
            None => spd_check(field.as_ref(), alpha, grid)?,
        };
        Ok(Self { field, report })
    }

    pub fn constant(k: Sym2, alpha: f64) -> Result<Self> {
        Self::new(ConstantField(k), alpha, &SampleGrid::default())
    }

    pub fn identity(alpha: f64) -> Result<Self> {
        Self::constant(Sym2::IDENTITY, alpha)
    }

    pub fn field(&self) -> &dyn TensorField {
        self.field.as_ref()
    }

    pub fn constant_value(&self) -> Option<Sym2> {
        self.field.constant()
    }

    pub fn lambda_min(&self) -> f64 {
        self.report.lambda_min
    }

    pub fn lambda_max(&self) -> f64 {
        self.report.lambda_max
    }

    pub fn wellposed(&self) -> bool {
        self.report.wellposed
    }

    pub fn report(&self) -> SpdReport {
        self.report
    }
}

/// Coefficients `(f, φ_i)_γ / ‖φ_i‖²_γ` on `trunc` with the default rule.
pub fn project(f: &dyn ScalarField, gamma: f64, trunc: Truncation) -> Result<CoeffVec> {
    project_with(f, gamma, trunc, &DiskRule::for_truncation(trunc, gamma, 0)?)
}

/// Projection with an explicit rule; `rule.beta` must equal `gamma`.
pub fn project_with(f: &dyn ScalarField, gamma: f64, trunc: Truncation, rule: &DiskRule) -> Result<CoeffVec> {
    if (rule.beta - gamma).abs() > 1e-14 {
        return Err(Error::Mismatch(format!("rule weight {} differs from gamma {gamma}", rule.beta)));
    }
    let moments = weighted_moments(f, gamma, trunc, rule)?;
    let modes = trunc.modes();
    let coeffs: Vec<f64> =
        modes.iter().zip(&moments).map(|(m, v)| Ok(v / basis_norm_sq(*m, gamma)?)).collect::<Result<_>>()?;
    CoeffVec::from_dense(gamma, 0.0, trunc, &modes, &coeffs)
}

/// `(f, φ_i)_γ` for every mode of `trunc`, in canonical order.
pub fn weighted_moments(f: &dyn ScalarField, gamma: f64, trunc: Truncation, rule: &DiskRule) -> Result<Vec<f64>> {
    let dim = trunc.dim();
    let pts = rule.points();
    let chunks: Vec<Result<Vec<f64>>> = pts
        .par_chunks(256)
        .map(|chunk| {
            let mut acc = vec![0.0; dim];
            let mut row = vec![0.0; dim];
            let mut radial = vec![0.0; trunc.n_max + 1];
            for &(p, w) in chunk {
                let v = f.eval(p);
                if !v.is_finite() {
                    return Err(Error::NonFinite(format!("field sample at r={}, phi={}", p.r, p.phi)));
                }
                fill_basis_row(p, gamma, trunc, &mut radial, &mut row);
                let wv = w * v;
                for (a, b) in acc.iter_mut().zip(&row) {
                    *a += wv * b;
                }
            }
            Ok(acc)
        })
        .collect();
    let mut total = vec![0.0; dim];
    for c in chunks {
        for (t, v) in total.iter_mut().zip(c?) {
            *t += v;
        }
    }
    Ok(total)
}

/// Mass matrices `∫ ω^γ k_ab ψ_i ψ_j` for the three independent entries of `K`.
fn mass_matrices(k: &dyn TensorField, gamma: f64, trunc: Truncation, rule: &DiskRule) -> Result<[DMatrix<f64>; 3]> {
    let dim = trunc.dim();
    let pts = rule.points();
    let mut m = [DMatrix::zeros(dim, dim), DMatrix::zeros(dim, dim), DMatrix::zeros(dim, dim)];
    let mut radial = vec![0.0; trunc.n_max + 1];
    for chunk in pts.chunks(512) {
        let q = chunk.len();
        let mut psi = DMatrix::<f64>::zeros(q, dim);
        let mut row = vec![0.0; dim];
        let mut kv = Vec::with_capacity(q);
        for (i, &(p, w)) in chunk.iter().enumerate() {
            let kk = k.eval(p);
            if !(kk.k11.is_finite() && kk.k12.is_finite() && kk.k22.is_finite()) {
                return Err(Error::NonFinite(format!("diffusivity at r={}, phi={}", p.r, p.phi)));
            }
            kv.push((w * kk.k11, w * kk.k12, w * kk.k22));
            fill_basis_row(p, gamma, trunc, &mut radial, &mut row);
            for (j, v) in row.iter().enumerate() {
                psi[(i, j)] = *v;
            }
        }
        for (slot, pick) in m.iter_mut().zip([0usize, 1, 2]) {
            let mut scaled = psi.clone();
            for (i, kk) in kv.iter().enumerate() {
                let s = [kk.0, kk.1, kk.2][pick];
                scaled.row_mut(i).scale_mut(s);
            }
            slot.gemm_tr(1.0, &scaled, &psi, 1.0);
        }
    }
    Ok(m)
}

fn stack(fields: &[VecCoeffField], trunc: Truncation, gamma: f64) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let dim = trunc.dim();
    let mut x = DMatrix::zeros(dim, fields.len());
    let mut y = DMatrix::zeros(dim, fields.len());
    for (c, f) in fields.iter().enumerate() {
        if (f.gamma() - gamma).abs() > 1e-12 {
            return Err(Error::Mismatch(format!("field has gamma {} but the pairing weight is {gamma}", f.gamma())));
        }
        for (idx, v) in f.x.iter() {
            x[(trunc.position(idx).expect("truncation covers all fields"), c)] = *v;
        }
        for (idx, v) in f.y.iter() {
            y[(trunc.position(idx).expect("truncation covers all fields"), c)] = *v;
        }
    }
    Ok((x, y))
}

/// Matrix with entries `∫ ω^{α/2−1} (K U_i)·V_j`: row `j` indexes `v_rows`, column `i` indexes `u_cols`.
///
/// `margin` raises the quadrature resolution beyond what polynomial `K` needs.
pub fn weighted_gram_k(
    k: &DiffusivitySpec,
    u_cols: &[VecCoeffField],
    v_rows: &[VecCoeffField],
    alpha: f64,
    margin: usize,
) -> Result<DMatrix<f64>> {
    let gamma = alpha / 2.0 - 1.0;
    let trunc = u_cols
        .iter()
        .chain(v_rows)
        .map(VecCoeffField::truncation)
        .fold(Truncation::new(0, 0), |a, b| a.union(&b));
    let rule = DiskRule::for_truncation(trunc, gamma, margin)?;
    let [m11, m12, m22] = mass_matrices(k.field(), gamma, trunc, &rule)?;
    let (ux, uy) = stack(u_cols, trunc, gamma)?;
    let (vx, vy) = stack(v_rows, trunc, gamma)?;
    let kux = &m11 * &ux + &m12 * &uy;
    let kuy = &m12 * &ux + &m22 * &uy;
    Ok(vx.transpose() * kux + vy.transpose() * kuy)
}
