//! Seeded Monte Carlo studies: CI coverage, test size and power, θ̂ accuracy.
//!
//! Replication `r` draws from ChaCha stream `r` of the study seed, and rows are
//! reduced in replication order, so results do not depend on the worker count.

use std::collections::BTreeMap;

use clap::ValueEnum;
use fsdiff_core::diffusion::{simulate_observations, Scheme, Start};
use fsdiff_core::estimate::{estimate_values, studentize, EstimateConfig};
use fsdiff_core::gof::{test_joint, ParamsSource};
use fsdiff_core::rng::{stream_rng, FsRng};
use fsdiff_core::FsParams;
use rand_distr::{Distribution, Gamma};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};
use crate::stats::{ks_normal, ks_p_value, mean, std_dev};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Study {
    /// Studentized method-of-moments estimates and CI coverage.
    Coverage,
    /// Rejection rate of the polynomial test under the null.
    Size,
    /// Rejection rate against i.i.d. gamma data with the stationary mean.
    Power,
    /// Accuracy of the autocorrelation estimate of θ.
    Theta,
}

/// Largest θ·h of a simulation substep chosen by default.
pub const DEFAULT_THETA_STEP: f64 = 0.02;

pub fn default_substeps(theta: f64, dt: f64) -> usize {
    ((theta * dt / DEFAULT_THETA_STEP).ceil() as usize).max(1)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StudyConfig {
    pub study: Study,
    pub params: FsParams,
    pub reps: usize,
    pub seed: u64,
    /// Observations per replication.
    pub n_obs: usize,
    /// Observation spacing.
    pub dt: f64,
    /// Simulation steps between observations.
    pub substeps: usize,
    pub scheme: Scheme,
    pub level: f64,
    /// Numbers of polynomial conditions tested (size and power).
    pub m: Vec<usize>,
    pub lag_steps: Option<usize>,
    /// Half-width of the acceptance window for θ̂.
    pub theta_tol: f64,
}

impl StudyConfig {
    pub fn new(study: Study, params: FsParams, reps: usize, seed: u64) -> Self {
        let n_obs = match study {
            Study::Coverage => 100_000,
            Study::Size | Study::Power => 10_000,
            Study::Theta => 200_000,
        };
        StudyConfig {
            study,
            params,
            reps,
            seed,
            n_obs,
            dt: 1.0,
            substeps: default_substeps(params.theta, 1.0),
            scheme: Scheme::ExactDrift,
            level: 0.95,
            m: vec![1, 2],
            lag_steps: None,
            theta_tol: 0.05,
        }
    }

    fn validate(&self) -> CliResult<()> {
        let bad = |name, reason: &str| Err(CliError::InvalidArg { name, reason: reason.into() });
        if self.reps == 0 {
            return bad("reps", "must be positive");
        }
        if self.n_obs < 10 {
            return bad("n_obs", "need at least 10 observations");
        }
        if !(self.dt > 0.0) {
            return bad("dt", "must be positive");
        }
        if self.substeps == 0 {
            return bad("substeps", "must be positive");
        }
        if !(self.level > 0.0 && self.level < 1.0) {
            return bad("level", "must lie in (0, 1)");
        }
        if matches!(self.study, Study::Size | Study::Power) && (self.m.is_empty() || self.m.contains(&0)) {
            return bad("m", "need at least one positive number of conditions");
        }
        if !(self.theta_tol > 0.0) {
            return bad("theta_tol", "must be positive");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoverageRow {
    pub rep: usize,
    pub alpha_hat: Option<f64>,
    pub beta_hat: Option<f64>,
    pub theta_hat: Option<f64>,
    pub z_alpha: Option<f64>,
    pub z_beta: Option<f64>,
    pub covered_alpha: Option<bool>,
    pub covered_beta: Option<bool>,
    pub error: Option<&'static str>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TestRow {
    pub rep: usize,
    /// One entry per element of `m`.
    pub statistic: Vec<Option<f64>>,
    pub p_value: Vec<Option<f64>>,
    pub reject: Vec<Option<bool>>,
    pub error: Option<&'static str>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThetaRow {
    pub rep: usize,
    pub theta_hat: Option<f64>,
    pub lag_steps: Option<usize>,
    pub within: Option<bool>,
    pub error: Option<&'static str>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Row {
    Coverage(CoverageRow),
    Test(TestRow),
    Theta(ThetaRow),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StudySummary {
    pub schema_version: u32,
    #[serde(flatten)]
    pub config: StudyConfig,
    pub metrics: BTreeMap<String, f64>,
    pub rows: Vec<Row>,
}

fn stationary_path(cfg: &StudyConfig, rng: &mut FsRng) -> fsdiff_core::Result<Vec<f64>> {
    let h = cfg.dt / cfg.substeps as f64;
    simulate_observations(&cfg.params, Start::Stationary, cfg.n_obs, h, cfg.substeps, cfg.scheme, rng).map(|r| r.0)
}

fn coverage_rep(cfg: &StudyConfig, rep: usize) -> CoverageRow {
    let mut row = CoverageRow {
        rep,
        alpha_hat: None,
        beta_hat: None,
        theta_hat: None,
        z_alpha: None,
        z_beta: None,
        covered_alpha: None,
        covered_beta: None,
        error: None,
    };
    let mut rng = stream_rng(cfg.seed, rep as u64);
    let est_cfg = EstimateConfig { lag_steps: cfg.lag_steps, level: cfg.level, ..EstimateConfig::default() };
    let p = &cfg.params;
    let report = match stationary_path(cfg, &mut rng).and_then(|v| estimate_values(&v, cfg.dt, &est_cfg)) {
        Ok(r) => r,
        Err(e) => {
            row.error = Some(e.code());
            return row;
        }
    };
    row.alpha_hat = Some(report.alpha_hat);
    row.beta_hat = Some(report.beta_hat);
    row.theta_hat = Some(report.theta_hat);
    row.covered_alpha = report.ci_alpha.map(|(lo, hi)| lo <= p.alpha && p.alpha <= hi);
    row.covered_beta = report.ci_beta.map(|(lo, hi)| lo <= p.beta && p.beta <= hi);
    match studentize(&report, p.alpha, p.beta) {
        Ok([za, zb]) => {
            row.z_alpha = Some(za);
            row.z_beta = Some(zb);
        }
        Err(e) => row.error = Some(e.code()),
    }
    row
}

fn test_rep(cfg: &StudyConfig, rep: usize) -> TestRow {
    let k = cfg.m.len();
    let mut row = TestRow { rep, statistic: vec![None; k], p_value: vec![None; k], reject: vec![None; k], error: None };
    let mut rng = stream_rng(cfg.seed, rep as u64);
    let p = &cfg.params;
    let sample = match cfg.study {
        Study::Power => {
            let shape = p.alpha / 2.0;
            let g = Gamma::new(shape, p.mean() / shape).expect("positive shape and scale");
            Ok((0..cfg.n_obs).map(|_| g.sample(&mut rng)).collect())
        }
        _ => stationary_path(cfg, &mut rng),
    };
    let sample = match sample {
        Ok(s) => s,
        Err(e) => {
            row.error = Some(e.code());
            return row;
        }
    };
    for (i, &m) in cfg.m.iter().enumerate() {
        match test_joint(p, &sample, cfg.dt, m, ParamsSource::Known) {
            Ok(r) => {
                row.statistic[i] = Some(r.statistic);
                row.p_value[i] = Some(r.p_value);
                row.reject[i] = Some(r.p_value < 1.0 - cfg.level);
            }
            Err(e) => row.error = Some(e.code()),
        }
    }
    row
}

fn theta_rep(cfg: &StudyConfig, rep: usize) -> ThetaRow {
    let mut row = ThetaRow { rep, theta_hat: None, lag_steps: None, within: None, error: None };
    let mut rng = stream_rng(cfg.seed, rep as u64);
    let est_cfg = EstimateConfig { lag_steps: cfg.lag_steps, level: cfg.level, ..EstimateConfig::default() };
    match stationary_path(cfg, &mut rng).and_then(|v| estimate_values(&v, cfg.dt, &est_cfg)) {
        Ok(r) => {
            row.theta_hat = Some(r.theta_hat);
            row.lag_steps = r.lag_steps;
            row.within = Some((r.theta_hat - cfg.params.theta).abs() <= cfg.theta_tol);
        }
        Err(e) => row.error = Some(e.code()),
    }
    row
}

fn fraction(flags: impl Iterator<Item = Option<bool>>) -> f64 {
    let (mut hit, mut total) = (0usize, 0usize);
    for f in flags.flatten() {
        total += 1;
        hit += f as usize;
    }
    if total == 0 {
        f64::NAN
    } else {
        hit as f64 / total as f64
    }
}

fn coverage_metrics(rows: &[CoverageRow], m: &mut BTreeMap<String, f64>) {
    m.insert("failures".into(), rows.iter().filter(|r| r.error.is_some()).count() as f64);
    m.insert("coverage_alpha".into(), fraction(rows.iter().map(|r| r.covered_alpha)));
    m.insert("coverage_beta".into(), fraction(rows.iter().map(|r| r.covered_beta)));
    for (name, z) in [
        ("alpha", rows.iter().filter_map(|r| r.z_alpha).collect::<Vec<_>>()),
        ("beta", rows.iter().filter_map(|r| r.z_beta).collect::<Vec<_>>()),
    ] {
        if z.len() >= 2 {
            let d = ks_normal(&z);
            m.insert(format!("ks_{name}"), d);
            m.insert(format!("ks_p_{name}"), ks_p_value(d, z.len()));
            m.insert(format!("z_mean_{name}"), mean(&z));
            m.insert(format!("z_sd_{name}"), std_dev(&z));
        }
    }
    for (name, v) in [
        ("alpha_hat", rows.iter().filter_map(|r| r.alpha_hat).collect::<Vec<_>>()),
        ("beta_hat", rows.iter().filter_map(|r| r.beta_hat).collect::<Vec<_>>()),
        ("theta_hat", rows.iter().filter_map(|r| r.theta_hat).collect::<Vec<_>>()),
    ] {
        if !v.is_empty() {
            m.insert(format!("mean_{name}"), mean(&v));
        }
    }
}

fn test_metrics(rows: &[TestRow], ms: &[usize], m: &mut BTreeMap<String, f64>) {
    m.insert("failures".into(), rows.iter().filter(|r| r.error.is_some()).count() as f64);
    for (i, k) in ms.iter().enumerate() {
        m.insert(format!("reject_rate_m{k}"), fraction(rows.iter().map(|r| r.reject[i])));
    }
}

fn theta_metrics(rows: &[ThetaRow], m: &mut BTreeMap<String, f64>) {
    m.insert("failures".into(), rows.iter().filter(|r| r.error.is_some()).count() as f64);
    m.insert("fraction_within".into(), fraction(rows.iter().map(|r| r.within)));
    let th: Vec<f64> = rows.iter().filter_map(|r| r.theta_hat).collect();
    if th.len() >= 2 {
        m.insert("mean_theta_hat".into(), mean(&th));
        m.insert("sd_theta_hat".into(), std_dev(&th));
    }
}

fn collect<T: Send>(reps: usize, f: impl Fn(usize) -> T + Sync + Send) -> Vec<T> {
    (0..reps).into_par_iter().map(f).collect()
}

/// Runs a study on the current rayon pool.
pub fn run_study(cfg: &StudyConfig) -> CliResult<StudySummary> {
    cfg.validate()?;
    if cfg.study != Study::Power && !cfg.params.ergodic() {
        return Err(fsdiff_core::Error::InvalidParams("simulation needs alpha > 2").into());
    }
    let mut metrics = BTreeMap::new();
    let rows = match cfg.study {
        Study::Coverage => {
            let rows = collect(cfg.reps, |r| coverage_rep(cfg, r));
            coverage_metrics(&rows, &mut metrics);
            rows.into_iter().map(Row::Coverage).collect()
        }
        Study::Size | Study::Power => {
            let rows = collect(cfg.reps, |r| test_rep(cfg, r));
            test_metrics(&rows, &cfg.m, &mut metrics);
            rows.into_iter().map(Row::Test).collect()
        }
        Study::Theta => {
            let rows = collect(cfg.reps, |r| theta_rep(cfg, r));
            theta_metrics(&rows, &mut metrics);
            rows.into_iter().map(Row::Theta).collect()
        }
    };
    Ok(StudySummary { schema_version: crate::SCHEMA_VERSION, config: cfg.clone(), metrics, rows })
}

/// Runs a study on a dedicated pool of `threads` workers.
pub fn run_study_with_threads(cfg: &StudyConfig, threads: Option<usize>) -> CliResult<StudySummary> {
    match threads {
        None => run_study(cfg),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| CliError::Pool(e.to_string()))?;
            pool.install(|| run_study(cfg))
        }
    }
}

/// Worker count from `FSDIFF_THREADS`, if set to a positive integer.
pub fn threads_from_env() -> CliResult<Option<usize>> {
    match std::env::var("FSDIFF_THREADS") {
        Err(_) => Ok(None),
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(CliError::InvalidArg { name: "FSDIFF_THREADS", reason: format!("not a positive integer: {s:?}") }),
        },
    }
}
