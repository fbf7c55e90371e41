//! Assembly and solution of the discrete weak problem.
//!
//! Trial functions are `ω^{α/2}φ_i` and test functions `ω^{α/2}φ_j`, so the system is square.
//! Row `j`, column `i` of the matrix holds `∫ ω^{α/2−1}(K U_i)·V_j`, where `U_i` is the weighted
//! gradient of the trial function and `V_j` the Riesz gradient of the test function. Constant
//! diffusivities are assembled exactly from the stencils; variable ones by quadrature.

use std::collections::HashMap;
use std::sync::Arc;
use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::Serialize;

use crate::basis::{basis_norm_sq, sobolev_norm, BasisIndex, CoeffVec, PolarPoint, Truncation, VecCoeffField};
use crate::error::{domain, Error, Result};
use crate::ops::{grad_weighted, grad_weighted_terms, riesz_grad, riesz_grad_terms, unit_mode, Comp, Sym2};
use crate::quadrature::{weighted_gram_k, weighted_moments, DiffusivitySpec, DiskRule, ScalarField};

/// Right-hand side: an expansion in `P^{(α/2,l)}` without prefactor, or a field sampled by quadrature.
#[derive(Clone)]
pub enum Rhs {
    Coeffs(CoeffVec),
    Field(Arc<dyn ScalarField>),
}

impl std::fmt::Debug for Rhs {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Rhs::Coeffs(c) => f.debug_tuple("Coeffs").field(c).finish(),
            Rhs::Field(_) => f.write_str("Field(..)"),
        }
    }
}

/// How the matrix is built.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AssemblyMode {
    /// Closed form when `K` is constant, quadrature otherwise.
    Auto,
    ClosedForm,
    Quadrature,
}

#[derive(Debug, Clone)]
pub struct SolveConfig {
    pub alpha: f64,
    pub trunc: Truncation,
    pub k: DiffusivitySpec,
    pub rhs: Rhs,
    pub mode: AssemblyMode,
    /// Relative residual accepted from the linear solve.
    pub tol: f64,
    /// Extra radial and angular quadrature nodes for non-polynomial `K` or `f`.
    pub k_resolution: usize,
    /// Solve even when `K` violates the well-posedness ratio.
    pub allow_ill_posed: bool,
    /// Largest dimension solved by dense LU; GMRES above.
    pub direct_limit: usize,
    /// Largest dimension for which the normalized inf-sup value is computed.
    pub infsup_limit: usize,
}

impl SolveConfig {
    /// Configuration with a zero right-hand side and default numerics.
    pub fn new(alpha: f64, trunc: Truncation, k: DiffusivitySpec) -> Result<Self> {
        if !(alpha > 1.0 && alpha < 2.0) {
            return Err(domain("SolveConfig", format!("alpha must lie in (1, 2), got {alpha}")));
        }
        let rhs = Rhs::Coeffs(CoeffVec::zeros(alpha / 2.0, 0.0, trunc)?);
        Ok(Self {
            alpha,
            trunc,
            k,
            rhs,
            mode: AssemblyMode::Auto,
            tol: 1e-10,
            k_resolution: 8,
            allow_ill_posed: false,
            direct_limit: 4000,
            infsup_limit: 2500,
        })
    }

    pub fn with_rhs(mut self, rhs: Rhs) -> Self {
        self.rhs = rhs;
        self
    }

    pub fn with_mode(mut self, mode: AssemblyMode) -> Self {
        self.mode = mode;
        self
    }

    fn closed_form_k(&self) -> Result<Option<Sym2>> {
        match (self.mode, self.k.constant_value()) {
            (AssemblyMode::Quadrature, _) => Ok(None),
            (_, Some(k)) => Ok(Some(k)),
            (AssemblyMode::ClosedForm, None) => {
                Err(Error::Mismatch("closed-form assembly needs a spatially constant diffusivity".into()))
            }
            (AssemblyMode::Auto, None) => Ok(None),
        }
    }
}

/// Assembled square system in canonical mode order.
#[derive(Debug, Clone)]
pub struct LinearSystem {
    pub matrix: DMatrix<f64>,
    pub load: DVector<f64>,
    pub modes: Vec<BasisIndex>,
    /// The right-hand side as coefficients on the system's modes.
    pub rhs: CoeffVec,
    pub closed_form: bool,
}

type Terms = Vec<(Comp, BasisIndex, f64)>;

fn trial_terms(m: BasisIndex, alpha: f64) -> Terms {
    let mut out = Vec::with_capacity(4);
    grad_weighted_terms(m, 1.0, alpha / 2.0, &mut |c, t, v| out.push((c, t, v)));
    out
}

fn test_terms(m: BasisIndex, alpha: f64) -> Result<Terms> {
    let mut out = Vec::with_capacity(4);
    riesz_grad_terms(m, 1.0, alpha, &mut |c, t, v| out.push((c, t, v)))?;
    Ok(out)
}

fn field_terms(f: &VecCoeffField) -> Terms {
    f.x.iter().map(|(i, v)| (Comp::X, *i, *v)).chain(f.y.iter().map(|(i, v)| (Comp::Y, *i, *v))).collect()
}

fn k_entry(k: Sym2, a: Comp, b: Comp) -> f64 {
    match (a, b) {
        (Comp::X, Comp::X) => k.k11,
        (Comp::Y, Comp::Y) => k.k22,
        _ => k.k12,
    }
}

/// Entries `∫ ω^{α/2−1}(K U_col)·V_row` for constant `K` from stencil terms.
fn closed_form_pairs(k: Sym2, cols: &[Terms], rows: &[Terms], alpha: f64) -> Result<DMatrix<f64>> {
    let gamma = alpha / 2.0 - 1.0;
    let mut by_target: HashMap<BasisIndex, Vec<(usize, Comp, f64)>> = HashMap::new();
    for (r, terms) in rows.iter().enumerate() {
        for &(c, t, v) in terms {
            by_target.entry(t).or_default().push((r, c, v));
        }
    }
    let mut norms: HashMap<BasisIndex, f64> = HashMap::new();
    let mut m = DMatrix::zeros(rows.len(), cols.len());
    for (col, terms) in cols.iter().enumerate() {
        for &(c, t, u) in terms {
            let Some(list) = by_target.get(&t) else { continue };
            let w = match norms.get(&t) {
                Some(w) => *w,
                None => {
                    let w = basis_norm_sq(t, gamma)?;
                    norms.insert(t, w);
                    w
                }
            };
            for &(row, c2, v) in list {
                m[(row, col)] += k_entry(k, c, c2) * u * v * w;
            }
        }
    }
    Ok(m)
}

fn trial_fields(modes: &[BasisIndex], alpha: f64, trunc: Truncation) -> Result<Vec<VecCoeffField>> {
    let h = alpha / 2.0;
    modes.par_iter().map(|m| grad_weighted(&unit_mode(*m, h, h, trunc)?)).collect()
}

fn test_fields(modes: &[BasisIndex], alpha: f64, trunc: Truncation) -> Result<Vec<VecCoeffField>> {
    let h = alpha / 2.0;
    modes.par_iter().map(|m| riesz_grad(&unit_mode(*m, h, h, trunc)?, alpha)).collect()
}

fn mode_norms(modes: &[BasisIndex], beta: f64) -> Result<Vec<f64>> {
    modes.iter().map(|m| basis_norm_sq(*m, beta)).collect()
}

fn load_vector(cfg: &SolveConfig, modes: &[BasisIndex]) -> Result<(DVector<f64>, CoeffVec)> {
    let h = cfg.alpha / 2.0;
    let norms = mode_norms(modes, h)?;
    let coeffs: Vec<f64> = match &cfg.rhs {
        Rhs::Coeffs(f) => {
            if (f.gamma() - h).abs() > 1e-12 || f.prefactor() != 0.0 {
                return Err(Error::Mismatch(format!(
                    "right-hand side must be expanded in P^(alpha/2, l) without prefactor; got gamma={}, prefactor={}",
                    f.gamma(),
                    f.prefactor()
                )));
            }
            modes.iter().map(|m| f.get(m)).collect()
        }
        Rhs::Field(f) => {
            let rule = DiskRule::for_truncation(cfg.trunc, h, cfg.k_resolution)?;
            let moments = weighted_moments(f.as_ref(), h, cfg.trunc, &rule)?;
            moments.iter().zip(&norms).map(|(m, n)| m / n).collect()
        }
    };
    let load = DVector::from_iterator(modes.len(), coeffs.iter().zip(&norms).map(|(c, n)| c * n));
    let rhs = CoeffVec::from_dense(h, 0.0, cfg.trunc, modes, &coeffs)?;
    Ok((load, rhs))
}

/// Build the matrix and load vector.
///
/// Fails with [`Error::NotWellPosed`] unless `K` satisfies the ratio condition or
/// `allow_ill_posed` is set.
pub fn assemble(cfg: &SolveConfig) -> Result<LinearSystem> {
    if !cfg.k.wellposed() && !cfg.allow_ill_posed {
        return Err(Error::NotWellPosed {
            ratio: cfg.k.lambda_max() / cfg.k.lambda_min(),
            limit: crate::quadrature::wellposed_limit(cfg.alpha),
        });
    }
    let modes = cfg.trunc.modes();
    let closed = cfg.closed_form_k()?;
    let matrix = match closed {
        Some(k) => {
            let cols: Vec<Terms> = modes.iter().map(|m| trial_terms(*m, cfg.alpha)).collect();
            let rows: Vec<Terms> = modes.iter().map(|m| test_terms(*m, cfg.alpha)).collect::<Result<_>>()?;
            closed_form_pairs(k, &cols, &rows, cfg.alpha)?
        }
        None => {
            let us = trial_fields(&modes, cfg.alpha, cfg.trunc)?;
            let vs = test_fields(&modes, cfg.alpha, cfg.trunc)?;
            weighted_gram_k(&cfg.k, &us, &vs, cfg.alpha, cfg.k_resolution)?
        }
    };
    if matrix.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("assembled matrix".into()));
    }
    let (load, rhs) = load_vector(cfg, &modes)?;
    Ok(LinearSystem { matrix, load, modes, rhs, closed_form: closed.is_some() })
}

/// Forward map: coefficients `f_j` (in `P^{(α/2,l)}`, no prefactor) with
/// `(f, φ_j)_{α/2} = B(ũ, ω^{α/2}φ_j)` for every `j` of the input truncation grown by `(2, 1)`.
///
/// Exact for constant `K`. For variable `K` the image is infinite and is cut at that rectangle,
/// which still gives exact loads for any solve on a truncation inside it.
pub fn apply_operator(cfg: &SolveConfig, u: &CoeffVec) -> Result<CoeffVec> {
    let h = cfg.alpha / 2.0;
    if (u.gamma() - h).abs() > 1e-12 || (u.prefactor() - h).abs() > 1e-12 {
        return Err(Error::Mismatch(format!(
            "apply_operator expects the solution representation gamma=prefactor={h}; got gamma={}, prefactor={}",
            u.gamma(),
            u.prefactor()
        )));
    }
    let out_trunc = u.truncation().grow(2, 1);
    let modes = out_trunc.modes();
    let big_u = grad_weighted(u)?;
    let column = match cfg.closed_form_k()? {
        Some(k) => {
            let rows: Vec<Terms> = modes.iter().map(|m| test_terms(*m, cfg.alpha)).collect::<Result<_>>()?;
            closed_form_pairs(k, &[field_terms(&big_u)], &rows, cfg.alpha)?
        }
        None => {
            let vs = test_fields(&modes, cfg.alpha, out_trunc)?;
            weighted_gram_k(&cfg.k, &[big_u], &vs, cfg.alpha, cfg.k_resolution)?
        }
    };
    let norms = mode_norms(&modes, h)?;
    let coeffs: Vec<f64> = column.column(0).iter().zip(&norms).map(|(b, n)| b / n).collect();
    CoeffVec::from_dense(h, 0.0, out_trunc, &modes, &coeffs)
}

/// `((9α+2)/8)(λ_min − (2−α)/√(α(2+α)) λ_max)`.
pub fn c2_theoretical(alpha: f64, lambda_min: f64, lambda_max: f64) -> f64 {
    (9.0 * alpha + 2.0) / 8.0 * (lambda_min - (2.0 - alpha) / (alpha * (2.0 + alpha)).sqrt() * lambda_max)
}

/// `√((n+1)(n+l+1)‖φ‖²_{α/2})`: the trial-space norm of `ω^{α/2}φ`.
pub fn trial_norm(m: BasisIndex, alpha: f64) -> Result<f64> {
    Ok((m.sobolev_weight(1.0) * basis_norm_sq(m, alpha / 2.0)?).sqrt())
}

/// `√(((n+1)(n+l+1))^{α−1}‖φ‖²_{α/2})`: the test-space norm of `ω^{α/2}φ`.
pub fn test_norm(m: BasisIndex, alpha: f64) -> Result<f64> {
    Ok((m.sobolev_weight(alpha - 1.0) * basis_norm_sq(m, alpha / 2.0)?).sqrt())
}

/// Smallest singular value of the matrix with rows scaled by test norms and columns by trial norms.
pub fn infsup_constant(matrix: &DMatrix<f64>, modes: &[BasisIndex], alpha: f64) -> Result<f64> {
    if matrix.nrows() != modes.len() || matrix.ncols() != modes.len() {
        return Err(Error::Mismatch(format!(
            "matrix is {}x{} but there are {} modes",
            matrix.nrows(),
            matrix.ncols(),
            modes.len()
        )));
    }
    let rows: Vec<f64> = modes.iter().map(|m| test_norm(*m, alpha)).collect::<Result<_>>()?;
    let cols: Vec<f64> = modes.iter().map(|m| trial_norm(*m, alpha)).collect::<Result<_>>()?;
    let scaled = DMatrix::from_fn(modes.len(), modes.len(), |i, j| matrix[(i, j)] / (rows[i] * cols[j]));
    Ok(scaled.singular_values().min())
}

/// A-priori estimate `‖ũ‖_{ℋ¹} ≤ ‖f‖_{H^{−(α−1)}} / C₂`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AprioriCheck {
    pub solution_norm: f64,
    pub rhs_dual_norm: f64,
    pub c2_theoretical: f64,
    /// `None` when the constant is not positive.
    pub bound: Option<f64>,
    pub holds: Option<bool>,
    /// Whether `λ_min`, `λ_max` are exact (constant `K`) rather than sampled.
    pub exact_bounds: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SolveReport {
    /// Coefficients in `ω^{α/2} ⊗ P^{(α/2,l)}`; written separately as a table.
    #[serde(skip)]
    pub solution: CoeffVec,
    pub dimension: usize,
    pub residual: f64,
    pub condition_estimate: f64,
    pub method: &'static str,
    pub closed_form: bool,
    pub infsup: Option<f64>,
    pub s_est: Option<f64>,
    pub a_priori: AprioriCheck,
    pub wellposed: bool,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub wall_time_s: f64,
}

/// Assemble and solve.
pub fn solve(cfg: &SolveConfig) -> Result<SolveReport> {
    let start = Instant::now();
    let sys = assemble(cfg)?;
    let (x, residual, condition, method) = solve_system(&sys.matrix, &sys.load, cfg)?;
    let h = cfg.alpha / 2.0;
    let solution = CoeffVec::from_dense(h, h, cfg.trunc, &sys.modes, x.as_slice())?;
    let infsup = if sys.modes.len() <= cfg.infsup_limit {
        Some(infsup_constant(&sys.matrix, &sys.modes, cfg.alpha)?)
    } else {
        None
    };
    let s_est = regularity_report(&solution).ok();
    let c2 = c2_theoretical(cfg.alpha, cfg.k.lambda_min(), cfg.k.lambda_max());
    let solution_norm = sobolev_norm(&solution, 1.0);
    let rhs_dual_norm = sobolev_norm(&sys.rhs, -(cfg.alpha - 1.0));
    let bound = (c2 > 0.0).then(|| rhs_dual_norm / c2);
    let a_priori = AprioriCheck {
        solution_norm,
        rhs_dual_norm,
        c2_theoretical: c2,
        bound,
        holds: bound.map(|b| solution_norm <= b * (1.0 + 1e-10)),
        exact_bounds: cfg.k.constant_value().is_some(),
    };
    Ok(SolveReport {
        dimension: sys.modes.len(),
        solution,
        residual,
        condition_estimate: condition,
        method,
        closed_form: sys.closed_form,
        infsup,
        s_est,
        a_priori,
        wellposed: cfg.k.wellposed(),
        lambda_min: cfg.k.lambda_min(),
        lambda_max: cfg.k.lambda_max(),
        wall_time_s: start.elapsed().as_secs_f64(),
    })
}

fn relative_residual(a: &DMatrix<f64>, x: &DVector<f64>, b: &DVector<f64>) -> f64 {
    let bn = b.norm();
    if bn == 0.0 {
        (a * x).norm()
    } else {
        (a * x - b).norm() / bn
    }
}

fn solve_system(a: &DMatrix<f64>, b: &DVector<f64>, cfg: &SolveConfig) -> Result<(DVector<f64>, f64, f64, &'static str)> {
    let n = b.len();
    if b.iter().all(|v| *v == 0.0) {
        return Ok((DVector::zeros(n), 0.0, f64::NAN, "trivial"));
    }
    if n <= cfg.direct_limit {
        let lu = a.clone().lu();
        let u = lu.u();
        let diag: Vec<f64> = u.diagonal().iter().map(|v| v.abs()).collect();
        let (lo, hi) = diag.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), v| (lo.min(*v), hi.max(*v)));
        let condition = if lo > 0.0 { hi / lo } else { f64::INFINITY };
        let Some(x) = lu.solve(b) else {
            return Err(Error::IllConditioned { condition, residual: f64::NAN });
        };
        let residual = relative_residual(a, &x, b);
        if !(residual <= cfg.tol) {
            return Err(Error::IllConditioned { condition, residual });
        }
        Ok((x, residual, condition, "lu"))
    } else {
        let (x, residual, iterations) = gmres(a, b, cfg.tol, 100, 20 * n)?;
        if !(residual <= cfg.tol) {
            return Err(Error::NoConvergence { iterations, residual });
        }
        Ok((x, residual, f64::NAN, "gmres"))
    }
}

/// Restarted GMRES with a Jacobi preconditioner applied on the left.
/// Returns the solution, its unpreconditioned relative residual and the iteration count.
pub fn gmres(a: &DMatrix<f64>, b: &DVector<f64>, tol: f64, restart: usize, max_iter: usize) -> Result<(DVector<f64>, f64, usize)> {
    let n = b.len();
    let dinv: DVector<f64> = DVector::from_iterator(
        n,
        a.diagonal().iter().map(|d| if *d != 0.0 && d.is_finite() { 1.0 / d } else { 1.0 }),
    );
    let precond = |v: &DVector<f64>| v.component_mul(&dinv);
    let pb = precond(b);
    let pb_norm = pb.norm();
    let mut x = DVector::zeros(n);
    if pb_norm == 0.0 {
        return Ok((x, 0.0, 0));
    }
    let m = restart.max(1).min(n);
    let mut iterations = 0;
    // the preconditioned tolerance is tightened so the true residual also meets `tol`
    let inner_tol = tol * 0.1;
    while iterations < max_iter {
        let r = precond(&(b - a * &x));
        let beta = r.norm();
        if beta / pb_norm <= inner_tol {
            break;
        }
        let mut basis: Vec<DVector<f64>> = vec![r / beta];
        let mut hess = DMatrix::<f64>::zeros(m + 1, m);
        let mut cs = vec![0.0; m];
        let mut sn = vec![0.0; m];
        let mut g = DVector::<f64>::zeros(m + 1);
        g[0] = beta;
        let mut k_used = 0;
        for k in 0..m {
            iterations += 1;
            let mut w = precond(&(a * &basis[k]));
            for (j, v) in basis.iter().enumerate() {
                let hjk = w.dot(v);
                hess[(j, k)] = hjk;
                w.axpy(-hjk, v, 1.0);
            }
            let wn = w.norm();
            hess[(k + 1, k)] = wn;
            for j in 0..k {
                let t = cs[j] * hess[(j, k)] + sn[j] * hess[(j + 1, k)];
                hess[(j + 1, k)] = -sn[j] * hess[(j, k)] + cs[j] * hess[(j + 1, k)];
                hess[(j, k)] = t;
            }
            let denom = hess[(k, k)].hypot(hess[(k + 1, k)]);
            cs[k] = if denom == 0.0 { 1.0 } else { hess[(k, k)] / denom };
            sn[k] = if denom == 0.0 { 0.0 } else { hess[(k + 1, k)] / denom };
            hess[(k, k)] = denom;
            hess[(k + 1, k)] = 0.0;
            g[k + 1] = -sn[k] * g[k];
            g[k] *= cs[k];
            k_used = k + 1;
            if g[k + 1].abs() / pb_norm <= inner_tol || wn == 0.0 || iterations >= max_iter {
                break;
            }
            basis.push(w / wn);
        }
        let mut y = vec![0.0; k_used];
        for i in (0..k_used).rev() {
            let mut s = g[i];
            for j in i + 1..k_used {
                s -= hess[(i, j)] * y[j];
            }
            if hess[(i, i)] == 0.0 {
                return Err(Error::IllConditioned { condition: f64::INFINITY, residual: f64::NAN });
            }
            y[i] = s / hess[(i, i)];
        }
        for (yi, v) in y.iter().zip(&basis) {
            x.axpy(*yi, v, 1.0);
        }
        if relative_residual(a, &x, b) <= tol {
            break;
        }
    }
    Ok((x.clone(), relative_residual(a, &x, b), iterations))
}

/// Physical values `ω^{α/2}Σ a φ` at each point; exactly zero on the boundary.
pub fn evaluate_solution(u: &CoeffVec, points: &[PolarPoint]) -> Result<Vec<f64>> {
    if let Some(p) = points.iter().find(|p| !(p.r >= 0.0 && p.r <= 1.0) || !p.phi.is_finite()) {
        return Err(domain("evaluate_solution", format!("point outside the closed disk: r={}, phi={}", p.r, p.phi)));
    }
    Ok(points.par_iter().map(|p| u.eval(*p)).collect())
}

/// Regularity scan grid: `s ∈ [0, 6]` in steps of 1/4.
pub const REGULARITY_GRID_MAX: f64 = 6.0;
const REGULARITY_STEP: f64 = 0.25;

/// Largest `s` on the scan grid for which the shell energies of the `ℋ^{1+s}` norm decay
/// summably.
///
/// Shell `m` collects the modes with `n + l = m`; its energy is
/// `Σ ((n+1)(n+l+1))^{1+s} a² ‖φ‖²`. Over the tail shells `m ∈ [m_max/3, m_max]` with
/// `m_max = min(L, N)` a least-squares slope of log-energy against `log m` is fitted; `s`
/// qualifies when the slope is below −1. An expansion with an empty tail returns the scan
/// maximum.
pub fn regularity_report(u: &CoeffVec) -> Result<f64> {
    let t = u.truncation();
    let m_max = t.l_max.min(t.n_max);
    if u.iter().all(|(_, a)| *a == 0.0) {
        return Err(Error::InsufficientModes("zero expansion has no decay rate".into()));
    }
    if m_max < 3 {
        return Err(Error::InsufficientModes(format!("need min(L, N) >= 3 for a shell fit, got {m_max}")));
    }
    let m_lo = m_max.div_ceil(3).max(1);
    let populated: Vec<usize> = (m_lo..=m_max)
        .filter(|&m| u.iter().any(|(i, a)| i.n() + i.l() == m && *a != 0.0))
        .collect();
    if populated.is_empty() {
        return Ok(REGULARITY_GRID_MAX);
    }
    if populated.len() < 3 {
        return Err(Error::InsufficientModes(format!(
            "only {} populated shells in the tail window [{m_lo}, {m_max}]",
            populated.len()
        )));
    }
    let gamma = u.gamma();
    let entries: Vec<(usize, f64, f64)> = u
        .iter()
        .filter(|(i, a)| **a != 0.0 && i.n() + i.l() >= m_lo && i.n() + i.l() <= m_max)
        .map(|(i, a)| Ok((i.n() + i.l(), ((i.n() + 1) as f64 * (i.n() + i.l() + 1) as f64).ln(), a * a * basis_norm_sq(*i, gamma)?)))
        .collect::<Result<_>>()?;
    let slope_at = |s: f64| {
        let pts: Vec<(f64, f64)> = populated
            .iter()
            .map(|&m| {
                let e: f64 = entries.iter().filter(|(mm, _, _)| *mm == m).map(|(_, lw, e)| ((1.0 + s) * lw).exp() * e).sum();
                ((m as f64).ln(), e.ln())
            })
            .collect();
        let k = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        sxy / sxx
    };
    let steps = (REGULARITY_GRID_MAX / REGULARITY_STEP).round() as usize;
    let mut best = 0.0;
    for i in 0..=steps {
        let s = i as f64 * REGULARITY_STEP;
        if slope_at(s) < -1.0 {
            best = s;
        } else {
            break;
        }
    }
    Ok(best)
}
