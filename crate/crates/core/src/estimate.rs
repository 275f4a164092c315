//! Estimation from a discretely observed stationary path: θ from the sample
//! autocorrelation, (α, β) by the method of moments, and the asymptotic
//! covariance of √n(α̂ − α, β̂ − β).
//!
//! Covariance formulas are written for unit-spaced observations. A path with
//! spacing dt is handled by substituting θ_eff = θ·dt.

use alloc::vec::Vec;

use crate::diffusion::SamplePath;
use crate::error::{Error, Result};
use crate::fsdist::FsParams;
use crate::linalg::{inv_sqrt, is_positive_definite, mat_vec, sandwich, Mat2};
use crate::specfun::norm_quantile;

/// ρ̂ at `lag` with separate means and variances for the leading and lagged
/// subsamples.
pub fn sample_acf(values: &[f64], lag: usize) -> Result<f64> {
    let n = values.len();
    if lag == 0 || lag >= n {
        return Err(Error::Domain { what: "lag (0 < lag < n)", value: lag as f64 });
    }
    let m = n - lag;
    let lead = &values[..m];
    let lagged = &values[lag..];
    let mean = |s: &[f64]| s.iter().sum::<f64>() / s.len() as f64;
    let (ma, mb) = (mean(lead), mean(lagged));
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (a, b) in lead.iter().zip(lagged) {
        let (da, db) = (a - ma, b - mb);
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    if !(saa > 0.0) || !(sbb > 0.0) {
        return Err(Error::DegenerateSample("zero variance in a lag subsample"));
    }
    Ok(sab / libm::sqrt(saa * sbb))
}

/// Conditions recorded alongside an estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize), serde(rename_all = "snake_case"))]
pub enum EstimationWarning {
    /// ρ̂ < 0; its absolute value was used.
    AcfNonPositive,
    /// |ρ̂| ≥ 1, giving θ̂ = 0.
    AcfAtOne,
    /// β̂ ≤ 8: the covariance does not exist and is omitted.
    CovarianceUnavailable,
    /// The covariance at the estimates is not positive definite.
    CovarianceNotPositiveDefinite,
    /// θ was supplied instead of estimated.
    ThetaKnown,
    /// The covariance follows the printed closed forms instead of the
    /// corrected cross-moment σ₁₂.
    PrintedCovariance,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThetaEstimate {
    pub theta: f64,
    pub rho: f64,
    pub lag_steps: usize,
    pub lag_t: f64,
    pub warnings: Vec<EstimationWarning>,
}

/// θ̂ = −ln|ρ̂(t)|/t with t = lag_steps·dt.
pub fn estimate_theta(values: &[f64], dt: f64, lag_steps: usize) -> Result<ThetaEstimate> {
    if !(dt > 0.0) {
        return Err(Error::InvalidPath("spacing must be positive"));
    }
    let rho = sample_acf(values, lag_steps)?;
    let lag_t = lag_steps as f64 * dt;
    let mut warnings = Vec::new();
    if rho < 0.0 {
        warnings.push(EstimationWarning::AcfNonPositive);
    }
    let r = rho.abs();
    let theta = if r >= 1.0 {
        warnings.push(EstimationWarning::AcfAtOne);
        0.0
    } else {
        -libm::log(r) / lag_t
    };
    Ok(ThetaEstimate { theta, rho, lag_steps, lag_t, warnings })
}

pub fn estimate_theta_path(path: &SamplePath, lag_steps: usize) -> Result<ThetaEstimate> {
    estimate_theta(&path.values, spacing(path)?, lag_steps)
}

fn spacing(path: &SamplePath) -> Result<f64> {
    path.dt.ok_or(Error::InvalidPath("estimation needs uniformly spaced observations"))
}

/// θ̂·t aimed at by [`default_lag_steps`].
pub const TARGET_THETA_T: f64 = 1.0;

/// Two-pass lag choice: the first lag (doubling from 1) with ρ̂ ≤ 0.5 gives a
/// pilot θ̂, then lag_steps = round(TARGET_THETA_T/(θ̂·dt)), capped at n/10.
pub fn default_lag_steps(values: &[f64], dt: f64) -> Result<usize> {
    let n = values.len();
    let cap = (n / 10).max(1);
    let mut lag = 1usize;
    let mut pilot = None;
    while lag <= cap {
        let rho = sample_acf(values, lag)?;
        if rho <= 0.5 {
            pilot = Some(-libm::log(rho.abs().clamp(1e-300, 1.0 - 1e-16)) / (lag as f64 * dt));
            break;
        }
        lag *= 2;
    }
    let steps = match pilot {
        Some(th) if th > 0.0 => libm::round(TARGET_THETA_T / (th * dt)) as usize,
        _ => cap,
    };
    Ok(steps.clamp(1, cap))
}

/// Sample moments m̄₁, m̄₂.
pub fn sample_moments(values: &[f64]) -> Result<(f64, f64)> {
    if values.len() < 2 {
        return Err(Error::DegenerateSample("need at least two observations"));
    }
    let n = values.len() as f64;
    let m1 = values.iter().sum::<f64>() / n;
    let m2 = values.iter().map(|x| x * x).sum::<f64>() / n;
    Ok((m1, m2))
}

/// Inversion of m₁ = β/(β−2), m₂ = β²(α+2)/(α(β−2)(β−4)).
pub fn alpha_beta_from_moments(m1: f64, m2: f64) -> Result<(f64, f64)> {
    if !(m1 > 1.0) {
        return Err(Error::MomentInversionFailed("first moment must exceed 1"));
    }
    let den = m2 * (2.0 - m1) - m1 * m1;
    if !(den > 0.0) {
        return Err(Error::MomentInversionFailed("alpha denominator is not positive"));
    }
    Ok((2.0 * m1 * m1 / den, 2.0 * m1 / (m1 - 1.0)))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentEstimate {
    pub alpha: f64,
    pub beta: f64,
    pub m1: f64,
    pub m2: f64,
}

pub fn estimate_alpha_beta(values: &[f64]) -> Result<MomentEstimate> {
    let (m1, m2) = sample_moments(values)?;
    let (alpha, beta) = alpha_beta_from_moments(m1, m2)?;
    Ok(MomentEstimate { alpha, beta, m1, m2 })
}

fn coth(x: f64) -> f64 {
    1.0 / libm::tanh(x)
}

fn need_cov(p: &FsParams) -> Result<()> {
    if p.covariance_ok() {
        Ok(())
    } else {
        Err(Error::MomentDoesNotExist { order: 4, beta: p.beta })
    }
}

/// Long-run covariance Σ of √n(m̄₁, m̄₂) for unit-spaced observations.
///
/// σ₁₂ is obtained from the cross moment E[X_{s+t}X_s²] summed over lags.
pub fn asymptotic_cov_m(p: &FsParams) -> Result<Mat2> {
    need_cov(p)?;
    let (a, b, th) = (p.alpha, p.beta, p.theta);
    let s11 = 2.0 * b * b * (a + b - 2.0) / (a * (b - 2.0) * (b - 2.0) * (b - 4.0)) * coth(th / 2.0);
    let s12 = 4.0 * b * b * b * (a + 2.0) * (a + b - 2.0)
        / (a * a * (b - 2.0) * (b - 2.0) * (b - 4.0) * (b - 6.0))
        * coth(th / 2.0);
    Ok([[s11, s12], [s12, sigma22_m(p)]])
}

/// Σ with σ₁₂ exactly as printed (β² in place of β³).
pub fn asymptotic_cov_m_as_printed(p: &FsParams) -> Result<Mat2> {
    let mut s = asymptotic_cov_m(p)?;
    s[0][1] /= p.beta;
    s[1][0] = s[0][1];
    Ok(s)
}

fn sigma22_m(p: &FsParams) -> f64 {
    let (a, b, th) = (p.alpha, p.beta, p.theta);
    let b4 = b * b * b * b;
    let a3 = a * a * a;
    let t1 = b4 * (a + 2.0) * ((a + 4.0) * (a + 6.0) * (b - 2.0) * (b - 4.0) - a * (a + 2.0) * (b - 6.0) * (b - 8.0))
        / (a3 * (b - 2.0) * (b - 2.0) * (b - 4.0) * (b - 4.0) * (b - 6.0) * (b - 8.0));
    let t2 = 16.0 * b4 * (a + 2.0) * (a + b - 2.0) * (a + b - 4.0)
        / (a3 * (b - 2.0) * (b - 4.0) * (b - 4.0) * (b - 6.0) * (b - 6.0) * (b - 8.0))
        / libm::expm1(2.0 * th * (b - 4.0) / (b - 2.0));
    let t3 = 16.0 * b4 * (a + 2.0) * (a + 2.0) * (a + b - 2.0)
        / (a3 * (b - 2.0) * (b - 2.0) * (b - 4.0) * (b - 6.0) * (b - 6.0))
        / libm::expm1(th);
    t1 + t2 + t3
}

/// Jacobian of (m₁, m₂) ↦ (α, β) at the population moments.
pub fn delta_jacobian(p: &FsParams) -> Mat2 {
    let (a, b) = (p.alpha, p.beta);
    [
        [
            a * (a + 2.0) * (b - 2.0) * (3.0 * b - 8.0) / (2.0 * b * (b - 4.0)),
            -a * a * (b - 2.0) * (b - 4.0) / (2.0 * b * b),
        ],
        [-(b - 2.0) * (b - 2.0) / 2.0, 0.0],
    ]
}

/// Σ(α, β, θ) = DΣDᵀ, the asymptotic covariance of √n(α̂ − α, β̂ − β).
pub fn asymptotic_cov_ab(p: &FsParams) -> Result<Mat2> {
    Ok(sandwich(&delta_jacobian(p), &asymptotic_cov_m(p)?))
}

/// DΣDᵀ built from the printed Σ.
pub fn asymptotic_cov_ab_printed_product(p: &FsParams) -> Result<Mat2> {
    Ok(sandwich(&delta_jacobian(p), &asymptotic_cov_m_as_printed(p)?))
}

/// The printed closed forms of the entries of Σ(α, β, θ).
pub fn asymptotic_cov_ab_closed_form(p: &FsParams) -> Result<Mat2> {
    need_cov(p)?;
    let (a, b, th) = (p.alpha, p.beta, p.theta);
    let c1 = coth(th / 2.0);
    let c2 = coth(th * (b - 4.0) / (b - 2.0));
    let b4 = (b - 4.0) * (b - 4.0) * (b - 4.0);
    let poly = -3072.0 + b * (6528.0 + b * (-4736.0 + b * (1548.0 + b * (-232.0 + 13.0 * b))));
    let v11 = a * (a + 2.0) * (b - 2.0) * (a + b - 2.0) / (2.0 * b * b4 * (b - 6.0) * (b - 6.0))
        * ((a + 2.0) * poly / (b - 2.0) * c1 + 4.0 * b * b4 * (a + b - 4.0) / (b - 8.0) * c2);
    let v12 = -(a + 2.0) * (b - 2.0) * (a + b - 2.0) * (b * (b - 4.0) * (3.0 * b - 16.0) - 32.0)
        / (2.0 * (b - 4.0) * (b - 4.0) * (b - 6.0))
        * c1;
    let v22 = b * b * (b - 2.0) * (b - 2.0) * (a + b - 2.0) / (2.0 * a * (b - 4.0)) * c1;
    Ok([[v11, v12], [v12, v22]])
}

/// Which covariance feeds the report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize), serde(rename_all = "snake_case"))]
pub enum CovarianceRoute {
    #[default]
    Corrected,
    AsPrinted,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimateConfig {
    /// Lag for θ̂; chosen by [`default_lag_steps`] when `None`.
    pub lag_steps: Option<usize>,
    /// Confidence level of the intervals.
    pub level: f64,
    /// Use this θ instead of estimating it.
    pub theta_known: Option<f64>,
    pub route: CovarianceRoute,
}

impl Default for EstimateConfig {
    fn default() -> Self {
        EstimateConfig { lag_steps: None, level: 0.95, theta_known: None, route: CovarianceRoute::Corrected }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EstimationReport {
    pub theta_hat: f64,
    pub alpha_hat: f64,
    pub beta_hat: f64,
    pub m1: f64,
    pub m2: f64,
    pub rho_hat: Option<f64>,
    pub lag_steps: Option<usize>,
    pub lag_t: Option<f64>,
    pub dt: f64,
    /// θ̂·dt, the rate per observation step.
    pub theta_eff: f64,
    pub cov_asymptotic: Option<Mat2>,
    pub ci_alpha: Option<(f64, f64)>,
    pub ci_beta: Option<(f64, f64)>,
    pub level: f64,
    pub n_effective: usize,
    pub warnings: Vec<EstimationWarning>,
}

/// Full estimation pipeline on a uniformly spaced path.
pub fn estimate(path: &SamplePath, cfg: &EstimateConfig) -> Result<EstimationReport> {
    estimate_values(&path.values, spacing(path)?, cfg)
}

pub fn estimate_values(values: &[f64], dt: f64, cfg: &EstimateConfig) -> Result<EstimationReport> {
    if !(cfg.level > 0.0 && cfg.level < 1.0) {
        return Err(Error::Domain { what: "confidence level", value: cfg.level });
    }
    let mut warnings = Vec::new();
    let (theta_hat, rho_hat, lag_steps, lag_t) = match cfg.theta_known {
        Some(th) => {
            if !(th > 0.0) {
                return Err(Error::InvalidParams("theta must be positive and finite"));
            }
            warnings.push(EstimationWarning::ThetaKnown);
            (th, None, None, None)
        }
        None => {
            let lag = match cfg.lag_steps {
                Some(l) => l,
                None => default_lag_steps(values, dt)?,
            };
            let te = estimate_theta(values, dt, lag)?;
            warnings.extend_from_slice(&te.warnings);
            (te.theta, Some(te.rho), Some(lag), Some(te.lag_t))
        }
    };
    let me = estimate_alpha_beta(values)?;
    let theta_eff = theta_hat * dt;
    let n = values.len();
    let mut report = EstimationReport {
        theta_hat,
        alpha_hat: me.alpha,
        beta_hat: me.beta,
        m1: me.m1,
        m2: me.m2,
        rho_hat,
        lag_steps,
        lag_t,
        dt,
        theta_eff,
        cov_asymptotic: None,
        ci_alpha: None,
        ci_beta: None,
        level: cfg.level,
        n_effective: n,
        warnings,
    };
    let cov = FsParams::new(me.alpha, me.beta, theta_eff).and_then(|p| match cfg.route {
        CovarianceRoute::Corrected => asymptotic_cov_ab(&p),
        CovarianceRoute::AsPrinted => asymptotic_cov_ab_closed_form(&p),
    });
    match cov {
        Ok(v) => {
            if cfg.route == CovarianceRoute::AsPrinted {
                report.warnings.push(EstimationWarning::PrintedCovariance);
            }
            if !is_positive_definite(&v) {
                report.warnings.push(EstimationWarning::CovarianceNotPositiveDefinite);
            }
            let z = norm_quantile(0.5 + cfg.level / 2.0)?;
            let nf = n as f64;
            let half = |var: f64| z * libm::sqrt(var.max(0.0) / nf);
            report.ci_alpha = Some((me.alpha - half(v[0][0]), me.alpha + half(v[0][0])));
            report.ci_beta = Some((me.beta - half(v[1][1]), me.beta + half(v[1][1])));
            report.cov_asymptotic = Some(v);
        }
        Err(_) => report.warnings.push(EstimationWarning::CovarianceUnavailable),
    }
    Ok(report)
}

/// √n·Σ(α̂, β̂, θ̂)^{−1/2}(α̂ − α, β̂ − β).
pub fn studentize(report: &EstimationReport, alpha: f64, beta: f64) -> Result<[f64; 2]> {
    let cov = report.cov_asymptotic.ok_or(Error::NotPositiveDefinite)?;
    let r = inv_sqrt(&cov)?;
    let s = libm::sqrt(report.n_effective as f64);
    let v = mat_vec(&r, [report.alpha_hat - alpha, report.beta_hat - beta]);
    Ok([s * v[0], s * v[1]])
}
