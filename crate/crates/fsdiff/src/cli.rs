//! Command-line front end.
//!
//! Settings resolve as flag, then `--config` JSON file, then built-in default.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use fsdiff_core::diffusion::{simulate_with_stats, Scheme, Start};
use fsdiff_core::estimate::{estimate, CovarianceRoute, EstimateConfig, EstimationReport};
use fsdiff_core::fspoly::build_system;
use fsdiff_core::gof::{test_joint, test_single, GofResult, ParamsSource};
use fsdiff_core::spectral::{SpectralContext, WeightNorm};
use fsdiff_core::FsParams;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};
use crate::io::{read_path_csv, sink, wrap_io, write_json, write_path_csv, write_table};
use crate::replicate::{default_substeps, run_study_with_threads, threads_from_env, Study, StudyConfig};

#[derive(Debug, Parser)]
#[command(name = "fsdiff", version, about = "Fisher-Snedecor diffusion: simulation, estimation, testing, densities")]
pub struct Cli {
    /// JSON file of settings; command-line flags take precedence.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate a path and write it as `t,x` CSV.
    Simulate(SimulateArgs),
    /// Method-of-moments estimates with asymptotic confidence intervals.
    Estimate(EstimateArgs),
    /// Polynomial moment-condition goodness-of-fit test.
    Test(TestArgs),
    /// Spectral transition density on a grid.
    Density(DensityArgs),
    /// Coefficients of the orthonormal polynomial system.
    Poly(PolyArgs),
    /// Monte Carlo replication study.
    Replicate(ReplicateArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct ParamArgs {
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub theta: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SchemeArg {
    Euler,
    Milstein,
    ExactDrift,
}

impl From<SchemeArg> for Scheme {
    fn from(s: SchemeArg) -> Self {
        match s {
            SchemeArg::Euler => Scheme::Euler,
            SchemeArg::Milstein => Scheme::Milstein,
            SchemeArg::ExactDrift => Scheme::ExactDrift,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WeightArg {
    Derived,
    AsPrinted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RouteArg {
    Corrected,
    AsPrinted,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    /// Starting value.
    #[arg(long, conflicts_with = "stationary")]
    pub x0: Option<f64>,
    /// Draw the starting value from the invariant law.
    #[arg(long)]
    pub stationary: bool,
    #[arg(long)]
    pub t_end: Option<f64>,
    /// Step size [default: 0.01/θ].
    #[arg(long)]
    pub dt: Option<f64>,
    /// [default: milstein]
    #[arg(long, value_enum)]
    pub scheme: Option<SchemeArg>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output CSV [default: standard output].
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    /// Input path CSV with header `t,x`.
    #[arg(long = "in", value_name = "CSV")]
    pub input: Option<PathBuf>,
    /// Lag (in observations) for θ̂ [default: automatic].
    #[arg(long)]
    pub lag_steps: Option<usize>,
    /// Confidence level [default: 0.95].
    #[arg(long)]
    pub level: Option<f64>,
    /// Use this θ instead of estimating it.
    #[arg(long)]
    pub theta_known: Option<f64>,
    /// Covariance formulas [default: corrected].
    #[arg(long, value_enum)]
    pub route: Option<RouteArg>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TestArgs {
    #[arg(long = "in", value_name = "CSV")]
    pub input: Option<PathBuf>,
    /// Null parameters; estimated from the data when omitted.
    #[command(flatten)]
    pub params: ParamArgs,
    /// Joint test of F₁..Fₘ [default: 2].
    #[arg(long, conflicts_with = "j")]
    pub m: Option<usize>,
    /// Single-polynomial test of Fⱼ.
    #[arg(long)]
    pub j: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DensityArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    #[arg(long)]
    pub x0: Option<f64>,
    #[arg(long)]
    pub t: Option<f64>,
    /// `x_min,x_max,n`
    #[arg(long)]
    pub grid: Option<String>,
    /// Continuous-spectrum weight [default: derived].
    #[arg(long, value_enum)]
    pub weight: Option<WeightArg>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PolyArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    /// [default: the largest available degree]
    #[arg(long)]
    pub max_degree: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReplicateArgs {
    #[arg(long, value_enum)]
    pub study: Option<Study>,
    #[arg(long)]
    pub reps: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    pub params: ParamArgs,
    /// Observations per replication [default: depends on the study].
    #[arg(long)]
    pub n_obs: Option<usize>,
    /// Observation spacing [default: 1].
    #[arg(long)]
    pub dt: Option<f64>,
    /// Simulation steps per observation [default: ⌈50·θ·dt⌉].
    #[arg(long)]
    pub substeps: Option<usize>,
    /// [default: exact-drift]
    #[arg(long, value_enum)]
    pub scheme: Option<SchemeArg>,
    #[arg(long)]
    pub level: Option<f64>,
    /// Numbers of conditions for size/power, comma separated [default: 1,2].
    #[arg(long, value_delimiter = ',')]
    pub m: Option<Vec<usize>>,
    #[arg(long)]
    pub lag_steps: Option<usize>,
    /// Acceptance half-width for the θ study [default: 0.05].
    #[arg(long)]
    pub theta_tol: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// A single number or a list, as `m` may be either.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany {
    One(usize),
    Many(Vec<usize>),
}

impl OneOrMany {
    fn to_vec(&self) -> Vec<usize> {
        match self {
            OneOrMany::One(m) => vec![*m],
            OneOrMany::Many(v) => v.clone(),
        }
    }
}

/// Contents of a `--config` file. Every key is optional.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub theta: Option<f64>,
    pub seed: Option<u64>,
    pub x0: Option<f64>,
    pub stationary: Option<bool>,
    pub t_end: Option<f64>,
    pub dt: Option<f64>,
    pub scheme: Option<SchemeArg>,
    #[serde(rename = "in")]
    pub input: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub lag_steps: Option<usize>,
    pub level: Option<f64>,
    pub theta_known: Option<f64>,
    pub route: Option<RouteArg>,
    pub m: Option<OneOrMany>,
    pub j: Option<usize>,
    pub t: Option<f64>,
    pub grid: Option<String>,
    pub weight: Option<WeightArg>,
    pub max_degree: Option<usize>,
    pub study: Option<Study>,
    pub reps: Option<usize>,
    pub n_obs: Option<usize>,
    pub substeps: Option<usize>,
    pub theta_tol: Option<f64>,
}

impl FileConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.display().to_string(), source })?;
        serde_json::from_str(&text).map_err(|source| CliError::Config { path: path.display().to_string(), source })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_parsing() {
        assert_eq!(parse_grid("0.5, 2.5, 3").unwrap(), vec![0.5, 1.5, 2.5]);
        assert_eq!(parse_grid("1,2,1").unwrap(), vec![1.0]);
        for bad in ["1,2", "0,2,3", "2,1,3", "a,2,3", "1,2,0", "1,2,-3"] {
            assert!(parse_grid(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn config_accepts_number_or_list_for_m() {
        let c: FileConfig = serde_json::from_str(r#"{"m": 2}"#).unwrap();
        assert_eq!(c.m.unwrap().to_vec(), vec![2]);
        let c: FileConfig = serde_json::from_str(r#"{"m": [1, 3], "scheme": "exact-drift", "study": "size"}"#).unwrap();
        assert_eq!(c.m.unwrap().to_vec(), vec![1, 3]);
        assert_eq!(c.scheme, Some(SchemeArg::ExactDrift));
        assert!(serde_json::from_str::<FileConfig>(r#"{"alpah": 5}"#).is_err());
    }
}

#[derive(Debug, Serialize)]
pub struct EstimateOutput<'a> {
    pub schema_version: u32,
    #[serde(flatten)]
    pub report: &'a EstimationReport,
}

#[derive(Debug, Serialize)]
pub struct TestOutput<'a> {
    pub schema_version: u32,
    /// Parameters of the null hypothesis.
    pub params: FsParams,
    #[serde(flatten)]
    pub result: &'a GofResult,
}

fn params(flags: &ParamArgs, cfg: &FileConfig) -> CliResult<FsParams> {
    let alpha = flags.alpha.or(cfg.alpha).ok_or(CliError::Missing("alpha"))?;
    let beta = flags.beta.or(cfg.beta).ok_or(CliError::Missing("beta"))?;
    let theta = flags.theta.or(cfg.theta).ok_or(CliError::Missing("theta"))?;
    Ok(FsParams::new(alpha, beta, theta)?)
}

fn note(msg: &str) {
    eprintln!("fsdiff: {msg}");
}

fn positive(name: &'static str, v: f64) -> CliResult<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(CliError::InvalidArg { name, reason: format!("must be positive, got {v}") })
    }
}

/// Parses `x_min,x_max,n` into n equally spaced points.
pub fn parse_grid(s: &str) -> CliResult<Vec<f64>> {
    let bad = |reason: &str| CliError::InvalidArg { name: "grid", reason: format!("{reason}: {s:?}") };
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(bad("expected x_min,x_max,n"));
    }
    let lo: f64 = parts[0].parse().map_err(|_| bad("x_min is not a number"))?;
    let hi: f64 = parts[1].parse().map_err(|_| bad("x_max is not a number"))?;
    let n: usize = parts[2].parse().map_err(|_| bad("n is not a count"))?;
    if !(lo > 0.0 && hi > lo && hi.is_finite()) || n == 0 {
        return Err(bad("need 0 < x_min < x_max and n ≥ 1"));
    }
    if n == 1 {
        return Ok(vec![lo]);
    }
    Ok((0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect())
}

fn simulate_cmd(a: &SimulateArgs, cfg: &FileConfig) -> CliResult<()> {
    let p = params(&a.params, cfg)?;
    let start = if a.stationary {
        Start::Stationary
    } else if let Some(x0) = a.x0 {
        Start::At(x0)
    } else {
        match (cfg.x0, cfg.stationary) {
            (Some(_), Some(true)) => {
                return Err(CliError::Usage("config sets both x0 and stationary".into()));
            }
            (_, Some(true)) => Start::Stationary,
            (Some(x0), _) => Start::At(x0),
            _ => return Err(CliError::Missing("x0 or stationary")),
        }
    };
    let seed = a.seed.or(cfg.seed).ok_or(CliError::MissingSeed("simulate"))?;
    let t_end = positive("t_end", a.t_end.or(cfg.t_end).ok_or(CliError::Missing("t_end"))?)?;
    let dt = positive("dt", a.dt.or(cfg.dt).unwrap_or(0.01 / p.theta))?;
    let scheme: Scheme = a.scheme.or(cfg.scheme).unwrap_or(SchemeArg::Milstein).into();
    let (path, stats) = simulate_with_stats(&p, start, t_end, dt, scheme, seed)?;
    if stats.clamped > 0 {
        note(&format!("{} of {} steps clamped at the positivity floor", stats.clamped, stats.steps));
    }
    let out = a.out.as_deref().or(cfg.out.as_deref());
    write_path_csv(sink(out)?, &path).map_err(wrap_io(out))
}

fn estimate_cmd(a: &EstimateArgs, cfg: &FileConfig) -> CliResult<()> {
    let input = a.input.as_deref().or(cfg.input.as_deref()).ok_or(CliError::Missing("in"))?;
    let path = read_path_csv(input)?;
    let route = match a.route.or(cfg.route).unwrap_or(RouteArg::Corrected) {
        RouteArg::Corrected => CovarianceRoute::Corrected,
        RouteArg::AsPrinted => CovarianceRoute::AsPrinted,
    };
    let ecfg = EstimateConfig {
        lag_steps: a.lag_steps.or(cfg.lag_steps),
        level: a.level.or(cfg.level).unwrap_or(0.95),
        theta_known: a.theta_known.or(cfg.theta_known),
        route,
    };
    let report = estimate(&path, &ecfg)?;
    for w in &report.warnings {
        note(&format!("warning: {w:?}"));
    }
    let out = a.out.as_deref().or(cfg.out.as_deref());
    write_json(sink(out)?, &EstimateOutput { schema_version: crate::SCHEMA_VERSION, report: &report })
}

fn test_cmd(a: &TestArgs, cfg: &FileConfig) -> CliResult<()> {
    let input = a.input.as_deref().or(cfg.input.as_deref()).ok_or(CliError::Missing("in"))?;
    let path = read_path_csv(input)?;
    let dt = path.dt.ok_or(fsdiff_core::Error::InvalidPath("observations must be equally spaced"))?;
    let any_param = a.params.alpha.or(cfg.alpha).is_some()
        || a.params.beta.or(cfg.beta).is_some()
        || a.params.theta.or(cfg.theta).is_some();
    let (p, source) = if any_param {
        (params(&a.params, cfg)?, ParamsSource::Known)
    } else {
        let r = estimate(&path, &EstimateConfig::default())?;
        note("no parameters given; testing at the method-of-moments estimates");
        (FsParams::new(r.alpha_hat, r.beta_hat, r.theta_hat)?, ParamsSource::Estimated)
    };
    let j = if a.m.is_some() { None } else { a.j.or(cfg.j) };
    let result = match j {
        Some(j) => test_single(&p, &path.values, dt, j, source)?,
        None => {
            let m = match (a.m, cfg.m.as_ref()) {
                (Some(m), _) => m,
                (None, Some(v)) => match v.to_vec().as_slice() {
                    [m] => *m,
                    _ => return Err(CliError::InvalidArg { name: "m", reason: "expected a single number".into() }),
                },
                (None, None) => 2,
            };
            test_joint(&p, &path.values, dt, m, source)?
        }
    };
    for w in &result.warnings {
        note(&format!("warning: {w:?}"));
    }
    let out = a.out.as_deref().or(cfg.out.as_deref());
    write_json(sink(out)?, &TestOutput { schema_version: crate::SCHEMA_VERSION, params: p, result: &result })
}

fn density_cmd(a: &DensityArgs, cfg: &FileConfig) -> CliResult<()> {
    let p = params(&a.params, cfg)?;
    let x0 = positive("x0", a.x0.or(cfg.x0).ok_or(CliError::Missing("x0"))?)?;
    let t = positive("t", a.t.or(cfg.t).ok_or(CliError::Missing("t"))?)?;
    let grid = parse_grid(a.grid.as_deref().or(cfg.grid.as_deref()).ok_or(CliError::Missing("grid"))?)?;
    let weight = match a.weight.or(cfg.weight).unwrap_or(WeightArg::Derived) {
        WeightArg::Derived => WeightNorm::Derived,
        WeightArg::AsPrinted => WeightNorm::AsPrinted,
    };
    let ctx = SpectralContext::new(&p)?.with_weight(weight);
    let parts = ctx.density_on_grid(x0, t, &grid)?;
    let floored = parts.iter().filter(|d| d.floored).count();
    if floored > 0 {
        note(&format!("{floored} grid points had a negative expansion value and were floored at 0"));
    }
    let header: Vec<String> = ["x", "p_d", "p_c", "p"].iter().map(|s| s.to_string()).collect();
    let rows: Vec<Vec<f64>> = parts.iter().map(|d| vec![d.x, d.p_d, d.p_c, d.p]).collect();
    let out = a.out.as_deref().or(cfg.out.as_deref());
    write_table(sink(out)?, &header, &rows, 0).map_err(wrap_io(out))
}

fn poly_cmd(a: &PolyArgs, cfg: &FileConfig) -> CliResult<()> {
    let p = params(&a.params, cfg)?;
    let sys = build_system(&p)?;
    let top = sys.len() - 1;
    let max = a.max_degree.or(cfg.max_degree).unwrap_or(top);
    if max > top {
        note(&format!("max degree {max} exceeds the system size {top}; truncated"));
    }
    let max = max.min(top);
    let mut header: Vec<String> = vec!["n".into(), "eigenvalue".into(), "norm_const".into()];
    header.extend((0..=max).map(|k| format!("c{k}")));
    let rows: Vec<Vec<f64>> = sys[..=max]
        .iter()
        .map(|f| {
            let mut row = vec![f.degree as f64, f.eigenvalue, f.norm_const];
            row.extend((0..=max).map(|k| f.coeffs.get(k).copied().unwrap_or(0.0)));
            row
        })
        .collect();
    let out = a.out.as_deref().or(cfg.out.as_deref());
    write_table(sink(out)?, &header, &rows, 1).map_err(wrap_io(out))
}

fn replicate_cmd(a: &ReplicateArgs, cfg: &FileConfig) -> CliResult<()> {
    let study = a.study.or(cfg.study).ok_or(CliError::Missing("study"))?;
    let reps = a.reps.or(cfg.reps).ok_or(CliError::Missing("reps"))?;
    let seed = a.seed.or(cfg.seed).ok_or(CliError::MissingSeed("replicate"))?;
    let p = params(&a.params, cfg)?;
    let mut sc = StudyConfig::new(study, p, reps, seed);
    if let Some(n) = a.n_obs.or(cfg.n_obs) {
        sc.n_obs = n;
    }
    if let Some(dt) = a.dt.or(cfg.dt) {
        sc.dt = dt;
        sc.substeps = default_substeps(p.theta, dt);
    }
    if let Some(s) = a.substeps.or(cfg.substeps) {
        sc.substeps = s;
    }
    if let Some(s) = a.scheme.or(cfg.scheme) {
        sc.scheme = s.into();
    }
    if let Some(l) = a.level.or(cfg.level) {
        sc.level = l;
    }
    if let Some(m) = a.m.clone().or_else(|| cfg.m.as_ref().map(OneOrMany::to_vec)) {
        sc.m = m;
    }
    sc.lag_steps = a.lag_steps.or(cfg.lag_steps);
    if let Some(t) = a.theta_tol.or(cfg.theta_tol) {
        sc.theta_tol = t;
    }
    let summary = run_study_with_threads(&sc, threads_from_env()?)?;
    for (k, v) in &summary.metrics {
        note(&format!("{k} = {v}"));
    }
    let out = a.out.as_deref().or(cfg.out.as_deref());
    write_json(sink(out)?, &summary)
}

pub fn run(cli: &Cli) -> CliResult<()> {
    let cfg = match &cli.config {
        Some(p) => FileConfig::load(p)?,
        None => FileConfig::default(),
    };
    match &cli.command {
        Command::Simulate(a) => simulate_cmd(a, &cfg),
        Command::Estimate(a) => estimate_cmd(a, &cfg),
        Command::Test(a) => test_cmd(a, &cfg),
        Command::Density(a) => density_cmd(a, &cfg),
        Command::Poly(a) => poly_cmd(a, &cfg),
        Command::Replicate(a) => replicate_cmd(a, &cfg),
    }
}

fn report(err: &CliError) -> i32 {
    let line = serde_json::to_string(&err.envelope()).unwrap_or_else(|_| format!("{{\"error\":\"{}\"}}", err.code()));
    let mut stderr = std::io::stderr().lock();
    let _ = writeln!(stderr, "{line}");
    err.exit_code()
}

/// Parses arguments, runs, and returns the process exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return 0;
            }
            return report(&CliError::Usage(e.render().to_string()));
        }
    };
    match run(&cli) {
        Ok(()) => 0,
        Err(e) => report(&e),
    }
}
