//! Closed catalogs of diffusivities and right-hand sides, parsed from short selectors.

use std::f64::consts::PI;
use std::sync::Arc;

use diskfrac::basis::{BasisIndex, CoeffVec, Mu, PolarPoint, Truncation};
use diskfrac::ops::Sym2;
use diskfrac::quadrature::{DiffusivitySpec, SampleGrid, ScalarField};
use diskfrac::solver::Rhs;

use crate::error::CliError;

fn numbers(field: &str, body: &str, count: usize) -> Result<Vec<f64>, CliError> {
    let vals: Vec<f64> = body
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| CliError::config(field, format!("expected {count} comma-separated numbers, got {body:?}")))?;
    if vals.len() != count || vals.iter().any(|v| !v.is_finite()) {
        return Err(CliError::config(field, format!("expected {count} finite numbers, got {body:?}")));
    }
    Ok(vals)
}

/// Diffusivity selectors:
/// `identity`, `diag:a,b`, `rotated:a,b,theta`, `radial:eps` (`(1+εr²)I`),
/// `angular:eps` (`(1+εr²cos2φ)I`).
pub fn parse_k(sel: &str, alpha: f64) -> Result<DiffusivitySpec, CliError> {
    let (name, body) = sel.split_once(':').unwrap_or((sel, ""));
    let built = match name {
        "identity" if body.is_empty() => DiffusivitySpec::identity(alpha),
        "diag" => {
            let v = numbers("K", body, 2)?;
            DiffusivitySpec::constant(Sym2::new(v[0], 0.0, v[1]), alpha)
        }
        "rotated" => {
            let v = numbers("K", body, 3)?;
            let (s, c) = v[2].sin_cos();
            let k = Sym2::new(v[0] * c * c + v[1] * s * s, (v[0] - v[1]) * c * s, v[0] * s * s + v[1] * c * c);
            DiffusivitySpec::constant(k, alpha)
        }
        "radial" => {
            let eps = numbers("K", body, 1)?[0];
            DiffusivitySpec::new(move |p: PolarPoint| Sym2::scaled(1.0 + eps * p.r * p.r), alpha, &SampleGrid::default())
        }
        "angular" => {
            let eps = numbers("K", body, 1)?[0];
            DiffusivitySpec::new(
                move |p: PolarPoint| Sym2::scaled(1.0 + eps * p.r * p.r * (2.0 * p.phi).cos()),
                alpha,
                &SampleGrid::default(),
            )
        }
        _ => {
            return Err(CliError::config(
                "K",
                format!("unknown selector {sel:?}; expected identity, diag:a,b, rotated:a,b,theta, radial:eps or angular:eps"),
            ))
        }
    };
    built.map_err(|e| CliError::config("K", e.to_string()))
}

/// `l,n,±1`.
pub fn parse_mode(field: &str, body: &str) -> Result<BasisIndex, CliError> {
    let parts: Vec<&str> = body.split(',').map(str::trim).collect();
    let bad = || CliError::config(field, format!("expected a mode `l,n,+1` or `l,n,-1`, got {body:?}"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let l: usize = parts[0].parse().map_err(|_| bad())?;
    let n: usize = parts[1].parse().map_err(|_| bad())?;
    let mu: i64 = parts[2].trim_start_matches('+').parse().map_err(|_| bad())?;
    let mu = Mu::from_sign(mu).map_err(|_| bad())?;
    BasisIndex::new(l, n, mu).map_err(|e| CliError::config(field, e.to_string()))
}

/// One monomial term `c*x^i*y^j`; factors may be omitted or reordered.
fn parse_term(term: &str) -> Option<(f64, i32, i32)> {
    let mut c = 1.0;
    let (mut i, mut j) = (0, 0);
    for factor in term.split('*').map(str::trim) {
        let (base, exp) = match factor.split_once('^') {
            Some((b, e)) => (b.trim(), e.trim().parse::<i32>().ok().filter(|e| *e >= 0)?),
            None => (factor, 1),
        };
        match base {
            "x" => i += exp,
            "y" => j += exp,
            num => c *= num.parse::<f64>().ok().filter(|v| v.is_finite())?,
        }
    }
    Some((c, i, j))
}

/// Right-hand-side selectors: `mode:l,n,±1`, `poly:c*x^i*y^j,...`, `gauss:c` (`exp(−c r²)`),
/// `absx` (`|x|`, limited smoothness).
pub fn parse_f(sel: &str, alpha: f64, trunc: Truncation) -> Result<Rhs, CliError> {
    let (name, body) = sel.split_once(':').unwrap_or((sel, ""));
    match name {
        "mode" => {
            let m = parse_mode("f", body)?;
            if !trunc.contains(&m) {
                return Err(CliError::config("f", format!("mode {body} lies outside the truncation L={}, N={}", trunc.l_max, trunc.n_max)));
            }
            let c = CoeffVec::from_entries(alpha / 2.0, 0.0, trunc, [(m, 1.0)]).map_err(|e| CliError::config("f", e.to_string()))?;
            Ok(Rhs::Coeffs(c))
        }
        "poly" => {
            let terms: Vec<(f64, i32, i32)> = body
                .split(',')
                .map(|t| parse_term(t).ok_or_else(|| CliError::config("f", format!("cannot parse polynomial term {t:?}"))))
                .collect::<Result<_, _>>()?;
            let field = move |p: PolarPoint| terms.iter().map(|(c, i, j)| c * p.x().powi(*i) * p.y().powi(*j)).sum::<f64>();
            Ok(Rhs::Field(Arc::new(field) as Arc<dyn ScalarField>))
        }
        "gauss" => {
            let c = numbers("f", body, 1)?[0];
            if c < 0.0 {
                return Err(CliError::config("f", "gauss width parameter must be non-negative"));
            }
            Ok(Rhs::Field(Arc::new(move |p: PolarPoint| (-c * p.r * p.r).exp())))
        }
        "absx" if body.is_empty() => Ok(Rhs::Field(Arc::new(|p: PolarPoint| p.x().abs()))),
        _ => Err(CliError::config(
            "f",
            format!("unknown selector {sel:?}; expected mode:l,n,mu, poly:terms, gauss:c or absx"),
        )),
    }
}

/// Polar evaluation grid `n_r × n_phi` including the center and the boundary circle.
pub fn polar_grid(n_r: usize, n_phi: usize) -> Vec<PolarPoint> {
    let mut pts = Vec::with_capacity(n_r * n_phi);
    for i in 0..n_r {
        let r = if n_r == 1 { 0.0 } else { i as f64 / (n_r - 1) as f64 };
        for j in 0..n_phi {
            pts.push(PolarPoint::new(r, 2.0 * PI * j as f64 / n_phi as f64).expect("grid point in the disk"));
        }
    }
    pts
}
