//! Run configuration: an optional TOML file merged with command-line flags (flags win).

use std::path::PathBuf;

use clap::Args;
use diskfrac::basis::Truncation;
use diskfrac::solver::AssemblyMode;
use diskfrac::verify::Suite;
use serde::Deserialize;

use crate::error::CliError;

/// Flags shared by every subcommand. Each may also be set in the config file under the same
/// name (`N`, `L`, `K` and the snake_case spellings of the others).
#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// TOML configuration file
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Fractional order α in (1, 2)
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Largest radial index n
    #[arg(long = "N")]
    pub n: Option<usize>,
    /// Largest harmonic degree l
    #[arg(long = "L")]
    pub l: Option<usize>,
    /// Diffusivity selector: identity, diag:a,b, rotated:a,b,theta, radial:eps, angular:eps
    #[arg(long = "K")]
    pub k: Option<String>,
    /// Right-hand side: mode:l,n,mu, poly:c*x^i*y^j,..., gauss:c, absx
    #[arg(long)]
    pub f: Option<String>,
    /// Input expansion for `apply` and manufactured convergence: mode:l,n,mu or file:PATH
    #[arg(long)]
    pub u: Option<String>,
    /// Output directory
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Seed for every randomized check
    #[arg(long)]
    pub seed: Option<u64>,
    /// Relative residual accepted from the linear solve
    #[arg(long)]
    pub tol: Option<f64>,
    /// Assembly: auto, closed-form or quadrature
    #[arg(long)]
    pub mode: Option<String>,
    /// Refuse to solve when K violates the well-posedness ratio
    #[arg(long)]
    pub strict: bool,
    /// Verification suite: constants, mapping or all
    #[arg(long)]
    pub suite: Option<String>,
    /// Evaluation grid for field.csv as RxPHI, e.g. 21x32
    #[arg(long)]
    pub grid: Option<String>,
    /// Random vectors per verification check
    #[arg(long)]
    pub n_random: Option<usize>,
    /// Truncation N = L for random-vector checks
    #[arg(long)]
    pub sample_trunc: Option<usize>,
    /// Convergence truncations, comma separated
    #[arg(long)]
    pub levels: Option<String>,
    /// Convergence reference: finest or manufactured
    #[arg(long)]
    pub reference: Option<String>,
    /// Extra quadrature nodes for non-polynomial K or f
    #[arg(long)]
    pub k_resolution: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    alpha: Option<f64>,
    #[serde(rename = "N")]
    n: Option<usize>,
    #[serde(rename = "L")]
    l: Option<usize>,
    #[serde(rename = "K")]
    k: Option<String>,
    f: Option<String>,
    u: Option<String>,
    out: Option<PathBuf>,
    seed: Option<u64>,
    tol: Option<f64>,
    mode: Option<String>,
    strict: Option<bool>,
    suite: Option<String>,
    grid: Option<String>,
    n_random: Option<usize>,
    sample_trunc: Option<usize>,
    levels: Option<Vec<usize>>,
    reference: Option<String>,
    k_resolution: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Reference {
    Finest,
    Manufactured,
}

/// Fully resolved and validated configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub alpha: f64,
    pub trunc: Truncation,
    pub k: String,
    pub f: String,
    pub u: Option<String>,
    pub out: PathBuf,
    pub seed: u64,
    pub tol: f64,
    pub mode: AssemblyMode,
    pub strict: bool,
    pub suite: Suite,
    pub grid: (usize, usize),
    pub n_random: usize,
    pub sample_trunc: usize,
    pub levels: Vec<usize>,
    pub reference: Reference,
    pub k_resolution: usize,
}

fn read_file(path: &PathBuf) -> Result<FileConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io { path: path.display().to_string(), source: e })?;
    toml::from_str(&text).map_err(|e| CliError::config(&path.display().to_string(), e.to_string()))
}

fn parse_grid(s: &str) -> Result<(usize, usize), CliError> {
    let bad = || CliError::config("grid", format!("expected RxPHI with both at least 1, got {s:?}"));
    let (r, p) = s.split_once('x').ok_or_else(bad)?;
    let r: usize = r.trim().parse().map_err(|_| bad())?;
    let p: usize = p.trim().parse().map_err(|_| bad())?;
    if r == 0 || p == 0 {
        return Err(bad());
    }
    Ok((r, p))
}

fn parse_levels(s: &str) -> Result<Vec<usize>, CliError> {
    s.split(',')
        .map(|t| t.trim().parse::<usize>().map_err(|_| CliError::config("levels", format!("cannot parse {t:?}"))))
        .collect()
}

impl RunConfig {
    pub fn resolve(flags: &Flags) -> Result<Self, CliError> {
        let file = match &flags.config {
            Some(p) => read_file(p)?,
            None => FileConfig::default(),
        };
        let alpha = flags.alpha.or(file.alpha).unwrap_or(1.5);
        if !(alpha > 1.0 && alpha < 2.0) {
            return Err(CliError::config("alpha", format!("must lie in (1, 2), got {alpha}")));
        }
        let n = flags.n.or(file.n).unwrap_or(8);
        let l = flags.l.or(file.l).unwrap_or(n);
        let tol = flags.tol.or(file.tol).unwrap_or(1e-10);
        if !(tol > 0.0 && tol < 1.0) {
            return Err(CliError::config("tol", format!("must lie in (0, 1), got {tol}")));
        }
        let mode = match flags.mode.clone().or(file.mode).as_deref().unwrap_or("auto") {
            "auto" => AssemblyMode::Auto,
            "closed-form" | "closed_form" => AssemblyMode::ClosedForm,
            "quadrature" => AssemblyMode::Quadrature,
            other => return Err(CliError::config("mode", format!("expected auto, closed-form or quadrature, got {other:?}"))),
        };
        let suite_name = flags.suite.clone().or(file.suite).unwrap_or_else(|| "constants".into());
        let suite = suite_name.parse::<Suite>().map_err(|e| CliError::config("suite", e.to_string()))?;
        let grid = parse_grid(&flags.grid.clone().or(file.grid).unwrap_or_else(|| "21x32".into()))?;
        let levels = match (&flags.levels, file.levels) {
            (Some(s), _) => parse_levels(s)?,
            (None, Some(v)) => v,
            (None, None) => vec![4, 8, 16, 32],
        };
        if levels.is_empty() || levels.windows(2).any(|w| w[1] <= w[0]) || levels[0] == 0 {
            return Err(CliError::config("levels", "need a strictly increasing list of positive truncations"));
        }
        let reference = match flags.reference.clone().or(file.reference).as_deref().unwrap_or("finest") {
            "finest" => Reference::Finest,
            "manufactured" => Reference::Manufactured,
            other => return Err(CliError::config("reference", format!("expected finest or manufactured, got {other:?}"))),
        };
        let n_random = flags.n_random.or(file.n_random).unwrap_or(1000);
        let sample_trunc = flags.sample_trunc.or(file.sample_trunc).unwrap_or(24);
        if n_random == 0 || sample_trunc == 0 {
            return Err(CliError::config("n_random", "n_random and sample_trunc must be positive"));
        }
        Ok(Self {
            alpha,
            trunc: Truncation::new(l, n),
            k: flags.k.clone().or(file.k).unwrap_or_else(|| "identity".into()),
            f: flags.f.clone().or(file.f).unwrap_or_else(|| "mode:0,0,+1".into()),
            u: flags.u.clone().or(file.u),
            out: flags.out.clone().or(file.out).unwrap_or_else(|| PathBuf::from("out")),
            seed: flags.seed.or(file.seed).unwrap_or(0),
            tol,
            mode,
            strict: flags.strict || file.strict.unwrap_or(false),
            suite,
            grid,
            n_random,
            sample_trunc,
            levels,
            reference,
            k_resolution: flags.k_resolution.or(file.k_resolution).unwrap_or(8),
        })
    }

    /// `key=value` pairs echoed into every output file.
    pub fn meta(&self, command: &str) -> Vec<(&'static str, String)> {
        vec![
            ("tool", "diskfrac".into()),
            ("version", env!("CARGO_PKG_VERSION").into()),
            ("command", command.into()),
            ("alpha", format!("{}", self.alpha)),
            ("L", self.trunc.l_max.to_string()),
            ("N", self.trunc.n_max.to_string()),
            ("K", self.k.clone()),
            ("f", self.f.clone()),
            ("seed", self.seed.to_string()),
        ]
    }
}
