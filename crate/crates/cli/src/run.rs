//! Subcommand bodies. Each returns the files to write; nothing touches the output directory
//! until the whole computation has succeeded.

use std::fmt::Write as _;
use std::path::Path;

use diskfrac::basis::{read_table, sobolev_norm, write_table, CoeffVec, Truncation};
use diskfrac::ops::{frac_laplacian_eigenvalue, unit_mode};
use diskfrac::quadrature::{wellposed_limit, DiffusivitySpec};
use diskfrac::solver::{apply_operator, evaluate_solution, solve, Rhs, SolveConfig, SolveReport};
use diskfrac::verify::{run_suite, CheckResult, SuiteOptions};
use serde_json::json;

use crate::catalog::{parse_f, parse_k, parse_mode, polar_grid};
use crate::config::{Reference, RunConfig};
use crate::error::CliError;

pub struct Output {
    pub name: String,
    pub contents: String,
}

pub struct RunResult {
    pub files: Vec<Output>,
    /// Returned after the files are written, e.g. failed checks.
    pub deferred_error: Option<CliError>,
}

impl RunResult {
    fn ok(files: Vec<Output>) -> Self {
        Self { files, deferred_error: None }
    }
}

fn out(name: impl Into<String>, contents: String) -> Output {
    Output { name: name.into(), contents }
}

fn header(cfg: &RunConfig, command: &str) -> String {
    let mut s = String::from("#");
    for (k, v) in cfg.meta(command) {
        let _ = write!(s, " {k}={}", v.replace(char::is_whitespace, ""));
    }
    s.push('\n');
    s
}

fn meta_json(cfg: &RunConfig, command: &str) -> serde_json::Value {
    serde_json::Value::Object(cfg.meta(command).into_iter().map(|(k, v)| (k.to_string(), json!(v))).collect())
}

fn table(cfg: &RunConfig, command: &str, c: &CoeffVec) -> String {
    let mut buf = header(cfg, command).into_bytes();
    write_table(&mut buf, c, cfg.alpha).expect("writing to memory");
    String::from_utf8(buf).expect("ascii table")
}

fn to_json(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable report");
    s.push('\n');
    s
}

/// Diffusivity with the well-posedness policy applied.
fn diffusivity(cfg: &RunConfig, warnings: &mut Vec<String>) -> Result<DiffusivitySpec, CliError> {
    let k = parse_k(&cfg.k, cfg.alpha)?;
    if !k.wellposed() {
        let msg = format!(
            "K={} violates the well-posedness ratio: lambda_max/lambda_min = {} >= {}",
            cfg.k,
            k.lambda_max() / k.lambda_min(),
            wellposed_limit(cfg.alpha)
        );
        if cfg.strict {
            return Err(CliError::Strict(msg));
        }
        eprintln!("warning: {msg}; solving anyway (use --strict to refuse)");
        warnings.push(msg);
    }
    Ok(k)
}

fn solve_config(cfg: &RunConfig, k: DiffusivitySpec, trunc: Truncation, rhs: Rhs) -> Result<SolveConfig, CliError> {
    let mut sc = SolveConfig::new(cfg.alpha, trunc, k)?.with_rhs(rhs).with_mode(cfg.mode);
    sc.tol = cfg.tol;
    sc.k_resolution = cfg.k_resolution;
    sc.allow_ill_posed = true;
    Ok(sc)
}

pub fn run_solve(cfg: &RunConfig) -> Result<RunResult, CliError> {
    let mut warnings = Vec::new();
    let k = diffusivity(cfg, &mut warnings)?;
    let rhs = parse_f(&cfg.f, cfg.alpha, cfg.trunc)?;
    let report: SolveReport = solve(&solve_config(cfg, k, cfg.trunc, rhs)?)?;
    let points = polar_grid(cfg.grid.0, cfg.grid.1);
    let values = evaluate_solution(&report.solution, &points)?;
    let mut field = header(cfg, "solve");
    field.push_str("r,phi,x,y,u\n");
    for (p, v) in points.iter().zip(&values) {
        let _ = writeln!(field, "{:e},{:e},{:e},{:e},{:e}", p.r, p.phi, p.x(), p.y(), v);
    }
    let json = json!({ "meta": meta_json(cfg, "solve"), "warnings": warnings, "report": report });
    Ok(RunResult::ok(vec![
        out("report.json", to_json(&json)),
        out("coeffs.csv", table(cfg, "solve", &report.solution)),
        out("field.csv", field),
    ]))
}

/// Input expansion in `ω^{α/2} ⊗ P^{(α/2,l)}` from `mode:l,n,mu` or `file:PATH`.
fn input_expansion(cfg: &RunConfig) -> Result<CoeffVec, CliError> {
    let sel = cfg.u.as_deref().ok_or_else(|| CliError::config("u", "this command needs an input expansion (--u)"))?;
    let h = cfg.alpha / 2.0;
    if let Some(body) = sel.strip_prefix("mode:") {
        let m = parse_mode("u", body)?;
        return unit_mode(m, h, h, cfg.trunc.union(&Truncation::new(m.l(), m.n()))).map_err(CliError::from);
    }
    if let Some(path) = sel.strip_prefix("file:") {
        let file = std::fs::File::open(path).map_err(|e| CliError::Io { path: path.into(), source: e })?;
        let (c, alpha) = read_table(std::io::BufReader::new(file)).map_err(|e| CliError::config("u", format!("{path}: {e}")))?;
        if (alpha - cfg.alpha).abs() > 1e-12 {
            return Err(CliError::config("u", format!("{path} was written for alpha={alpha}, not {}", cfg.alpha)));
        }
        if (c.gamma() - h).abs() > 1e-12 || (c.prefactor() - h).abs() > 1e-12 {
            return Err(CliError::config("u", format!("{path} must hold a solution expansion (gamma = prefactor = alpha/2)")));
        }
        return Ok(c);
    }
    Err(CliError::config("u", format!("expected mode:l,n,mu or file:PATH, got {sel:?}")))
}

pub fn run_apply(cfg: &RunConfig) -> Result<RunResult, CliError> {
    let mut warnings = Vec::new();
    let k = diffusivity(cfg, &mut warnings)?;
    let u = input_expansion(cfg)?;
    let sc = solve_config(cfg, k, u.truncation(), Rhs::Coeffs(CoeffVec::zeros(cfg.alpha / 2.0, 0.0, u.truncation())?))?;
    let f = apply_operator(&sc, &u)?;
    let json = json!({
        "meta": meta_json(cfg, "apply"),
        "warnings": warnings,
        "input_terms": u.len(),
        "output_terms": f.len(),
        "input_norm_h1": sobolev_norm(&u, 1.0),
        "output_norm_dual": sobolev_norm(&f, 1.0 - cfg.alpha),
    });
    Ok(RunResult::ok(vec![out("report.json", to_json(&json)), out("coeffs.csv", table(cfg, "apply", &f))]))
}

fn summary_label(r: &CheckResult) -> String {
    let p = &r.parameters;
    let mut parts = Vec::new();
    if let Some(s) = p.get("s_weight") {
        parts.push(format!("s_weight={s}"));
    }
    if let (Some(l), Some(n)) = (p.get("l_max"), p.get("n_max")) {
        parts.push(format!("trunc={l}x{n}"));
    }
    if let Some(lm) = p.get("lambda_max") {
        parts.push(format!("lambda_max={lm}"));
    }
    parts.join(";")
}

pub fn run_verify(cfg: &RunConfig) -> Result<RunResult, CliError> {
    let opts = SuiteOptions { seed: cfg.seed, n_random: cfg.n_random, sample_trunc: cfg.sample_trunc, ..SuiteOptions::default() };
    let results = run_suite(cfg.suite, cfg.alpha, &opts)?;
    let mut summary = header(cfg, "verify");
    summary.push_str("check,alpha,label,measured,bound,margin,pass\n");
    let mut files = Vec::new();
    let mut failed = 0;
    println!("{:<26} {:>5} {:<32} {:>14} {:>14} {:>12}  pass", "check", "alpha", "label", "measured", "bound", "margin");
    for (i, r) in results.iter().enumerate() {
        let pass = match r.pass {
            Some(true) => "true",
            Some(false) => {
                failed += 1;
                "false"
            }
            None => "exploratory",
        };
        let label = summary_label(r);
        let _ = writeln!(summary, "{},{},{},{:e},{:e},{:e},{}", r.name, r.alpha, label, r.measured, r.bound, r.margin, pass);
        println!("{:<26} {:>5} {:<32} {:>14.6e} {:>14.6e} {:>12.3e}  {pass}", r.name, r.alpha, label, r.measured, r.bound, r.margin);
        for a in r.failures() {
            println!("    failed: {} measured {:e} vs bound {:e} ({:?}, tol {:e})", a.name, a.measured, a.bound, a.relation, a.tolerance);
        }
        let json = json!({ "meta": meta_json(cfg, "verify"), "check": r });
        files.push(out(format!("checks/{i:02}_{}.json", r.name), to_json(&json)));
    }
    files.insert(0, out("verify_summary.csv", summary));
    Ok(RunResult { files, deferred_error: (failed > 0).then_some(CliError::ChecksFailed(failed)) })
}

fn lift(c: &CoeffVec, t: Truncation) -> Result<CoeffVec, CliError> {
    Ok(CoeffVec::from_entries(c.gamma(), c.prefactor(), t, c.iter().map(|(i, a)| (*i, *a)))?)
}

fn h1_distance(a: &CoeffVec, b: &CoeffVec) -> Result<f64, CliError> {
    let t = a.truncation().union(&b.truncation());
    // abs() clears the sign of sqrt(−0)
    Ok(sobolev_norm(&lift(a, t)?.sub(&lift(b, t)?)?, 1.0).abs())
}

pub fn run_convergence(cfg: &RunConfig) -> Result<RunResult, CliError> {
    let mut warnings = Vec::new();
    let k = diffusivity(cfg, &mut warnings)?;
    let h = cfg.alpha / 2.0;
    let mut solutions = Vec::new();
    let truth = match cfg.reference {
        Reference::Manufactured => {
            let u = input_expansion(cfg)?;
            let probe = solve_config(cfg, k.clone(), u.truncation(), Rhs::Coeffs(CoeffVec::zeros(h, 0.0, u.truncation())?))?;
            Some((u.clone(), apply_operator(&probe, &u)?))
        }
        Reference::Finest => None,
    };
    for &n in &cfg.levels {
        let t = Truncation::new(n, n);
        let rhs = match &truth {
            Some((_, f)) => Rhs::Coeffs(CoeffVec::from_entries(h, 0.0, t, f.iter().filter(|(i, _)| t.contains(i)).map(|(i, a)| (*i, *a)))?),
            None => parse_f(&cfg.f, cfg.alpha, t)?,
        };
        solutions.push(solve(&solve_config(cfg, k.clone(), t, rhs)?)?.solution);
    }
    let reference = match &truth {
        Some((u, _)) => u.clone(),
        None => solutions.last().expect("at least one level").clone(),
    };
    let errors: Vec<f64> = solutions.iter().map(|s| h1_distance(s, &reference)).collect::<Result<_, _>>()?;
    let mut csv = header(cfg, "convergence");
    let _ = writeln!(csv, "# reference={}", if truth.is_some() { "manufactured" } else { "finest" });
    csv.push_str("N,error,slope\n");
    for (i, (&n, &e)) in cfg.levels.iter().zip(&errors).enumerate() {
        let slope = if i > 0 && e > 0.0 && errors[i - 1] > 0.0 {
            format!("{:e}", (e / errors[i - 1]).ln() / (n as f64 / cfg.levels[i - 1] as f64).ln())
        } else {
            String::new()
        };
        let _ = writeln!(csv, "{n},{e:e},{slope}");
    }
    Ok(RunResult::ok(vec![out("convergence.csv", csv)]))
}

pub fn run_eigs(cfg: &RunConfig) -> Result<RunResult, CliError> {
    let mut csv = header(cfg, "eigs");
    csv.push_str("l,n,lambda\n");
    for l in 0..=cfg.trunc.l_max {
        for n in 0..=cfg.trunc.n_max {
            let m = diskfrac::basis::BasisIndex::new(l, n, diskfrac::basis::Mu::Cos)?;
            let _ = writeln!(csv, "{l},{n},{:e}", frac_laplacian_eigenvalue(m, cfg.alpha)?);
        }
    }
    Ok(RunResult::ok(vec![out("eigs.csv", csv)]))
}

/// Write every file under `dir`, creating subdirectories as needed.
pub fn write_outputs(dir: &Path, files: &[Output]) -> Result<(), CliError> {
    for f in files {
        let path = dir.join(&f.name);
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent).map_err(|e| CliError::Io { path: parent.display().to_string(), source: e })?;
        }
        std::fs::write(&path, &f.contents).map_err(|e| CliError::Io { path: path.display().to_string(), source: e })?;
    }
    Ok(())
}
