//! Stein-equation goodness of fit for the invariant law.
//!
//! Under H₀ the polynomials satisfy E[Fⱼ(X)] = 0 for j = 1..N and the scaled
//! sums n^{−1/2}ΣFⱼ(Xₜ) are asymptotically independent normals with variance
//! coth(λⱼ/2), λⱼ evaluated at the per-observation rate θ·dt.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::fsdist::{moment, pdf, FsParams};
use crate::fspoly::{build_system, eval_poly, expect, FsPolynomial};
use crate::quad::Integrator;
use crate::specfun::{chi_square_sf, digamma};

/// Scaling of the Stein operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize), serde(rename_all = "snake_case"))]
pub enum SteinNorm {
    /// 𝒜f = (2θ/(α(β−2)))x(αx+β)f′ − θ(x − β/(β−2))f.
    Generator,
    /// 𝒜₀f = 2x(αx+β)f′ + α(β − (β−2)x)f = (α(β−2)/θ)·𝒜f.
    ThetaFree,
}

impl SteinNorm {
    fn factor(self, p: &FsParams) -> f64 {
        match self {
            SteinNorm::Generator => 1.0,
            SteinNorm::ThetaFree => p.alpha * (p.beta - 2.0) / p.theta,
        }
    }
}

/// 𝒜f(x) given f(x) and f′(x).
pub fn stein_operator(p: &FsParams, norm: SteinNorm, f: f64, df: f64, x: f64) -> f64 {
    let (a, b, th) = (p.alpha, p.beta, p.theta);
    let gen = 2.0 * th / (a * (b - 2.0)) * x * (a * x + b) * df - th * (x - p.mean()) * f;
    gen * norm.factor(p)
}

/// Component hᵢ(x) = 2x(αx+β)fᵢ′(x) + α(β − (β−2)x)fᵢ(x) of a general test
/// vector. Experimental: only the polynomial specialization hᵢ = Fᵢ is
/// calibrated by [`test_joint`].
pub fn stein_h_component(p: &FsParams, f: f64, df: f64, x: f64) -> f64 {
    stein_operator(p, SteinNorm::ThetaFree, f, df, x)
}

/// Solver of 𝒜f = h − E[h(X)] by quadrature.
pub struct SteinSolver<'a> {
    p: FsParams,
    norm: SteinNorm,
    h: &'a dyn Fn(f64) -> f64,
    mean_h: f64,
    integrator: Integrator,
}

impl<'a> SteinSolver<'a> {
    pub fn new(p: &FsParams, norm: SteinNorm, h: &'a dyn Fn(f64) -> f64) -> Result<Self> {
        let mean_h = expect(p, h)?;
        Ok(SteinSolver { p: *p, norm, h, mean_h, integrator: Integrator::default() })
    }

    pub fn mean_h(&self) -> f64 {
        self.mean_h
    }

    /// f_h(x) = (2/(σ²𝔣𝔰))∫₀ˣ(h − Eh)𝔣𝔰, using the upper tail above the mean.
    pub fn solve(&self, x: f64) -> Result<f64> {
        let p = &self.p;
        if !(x > 0.0) || !x.is_finite() {
            return Err(Error::Domain { what: "stein solution (x > 0)", value: x });
        }
        let g = |y: f64| if y > 0.0 { ((self.h)(y) - self.mean_h) * pdf(p, y) } else { 0.0 };
        let m = p.mean();
        let integral = if x <= m {
            self.integrator.finite(g, 0.0, x)?
        } else {
            -self.integrator.half_line(g, x, x.max(m))?
        };
        let sigma2 = 4.0 * p.theta / (p.alpha * (p.beta - 2.0)) * x * (p.alpha * x + p.beta);
        Ok(2.0 * integral / (sigma2 * pdf(p, x)) / self.norm.factor(p))
    }
}

/// f_h(x) for one point.
pub fn stein_solution(p: &FsParams, norm: SteinNorm, h: &dyn Fn(f64) -> f64, x: f64) -> Result<f64> {
    SteinSolver::new(p, norm, h)?.solve(x)
}

/// Exact polynomial solution (ascending coefficients) of 𝒜f = h − E[h(X)]
/// for polynomial h of degree d; needs the moments of order ≤ d.
pub fn stein_solution_polynomial(p: &FsParams, norm: SteinNorm, h: &[f64]) -> Result<Vec<f64>> {
    let d = h.len().saturating_sub(1);
    if d == 0 {
        return Ok(alloc::vec![0.0]);
    }
    let mut mean_h = 0.0;
    for (k, c) in h.iter().enumerate() {
        mean_h += c * moment(p, k as u32)?;
    }
    let s = norm.factor(p);
    let (a, b, th) = (p.alpha, p.beta, p.theta);
    let g = 2.0 * th / (a * (b - 2.0));
    let m = p.mean();
    let mut r = h.to_vec();
    r[0] -= mean_h;
    // coefficient of x^j in 𝒜f: s[(gα(j−1) − θ)c_{j−1} + (gβj + θm)c_j]
    let mut c = alloc::vec![0.0; d + 1];
    for j in (1..=d).rev() {
        let jf = j as f64;
        let lead = g * a * (jf - 1.0) - th;
        c[j - 1] = (r[j] / s - (g * b * jf + th * m) * c[j]) / lead;
    }
    c.truncate(d);
    Ok(c)
}

/// Where the parameters of a test came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize), serde(rename_all = "snake_case"))]
pub enum ParamsSource {
    Known,
    /// Plugged-in estimates: the polynomial moment conditions are not robust
    /// to parameter uncertainty, so the nominal χ² calibration is only
    /// approximate.
    Estimated,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize), serde(rename_all = "snake_case"))]
pub enum GofWarning {
    /// More conditions were requested than the polynomial system holds.
    Truncated { requested: usize, used: usize },
    EstimatedParameters,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GofResult {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
    /// Indices j of the polynomials used.
    pub degrees: Vec<usize>,
    pub per_poly_z: Vec<f64>,
    pub variance_diag: Vec<f64>,
    pub params_source: ParamsSource,
    /// Observation spacing entering the variances through θ·dt.
    pub dt: f64,
    pub n: usize,
    pub warnings: Vec<GofWarning>,
}

/// (1/n)ΣFⱼ(Xₜ) for j = 1..m, with m cut to the system size.
pub fn moment_condition_check(p: &FsParams, sample: &[f64], m: usize) -> Result<(Vec<f64>, Vec<GofWarning>)> {
    let sys = build_system(p)?;
    let (used, warnings) = truncate(m, sys.len() - 1);
    let n = sample.len().max(1) as f64;
    let v = sys[1..=used].iter().map(|f| sample.iter().map(|&x| eval_poly(f, x)).sum::<f64>() / n).collect();
    Ok((v, warnings))
}

fn truncate(m: usize, max: usize) -> (usize, Vec<GofWarning>) {
    if m > max {
        (max, alloc::vec![GofWarning::Truncated { requested: m, used: max }])
    } else {
        (m, Vec::new())
    }
}

/// coth(λⱼ·dt/2), the long-run variance of Fⱼ along unit-indexed
/// observations spaced dt apart.
pub fn poly_variance(p: &FsParams, j: usize, dt: f64) -> f64 {
    1.0 / libm::tanh(p.eigenvalue(j) * dt / 2.0)
}

fn run_test(
    p: &FsParams,
    sample: &[f64],
    dt: f64,
    degrees: Vec<usize>,
    sys: &[FsPolynomial],
    source: ParamsSource,
    mut warnings: Vec<GofWarning>,
) -> Result<GofResult> {
    if sample.is_empty() {
        return Err(Error::DegenerateSample("empty sample"));
    }
    if !(dt > 0.0) {
        return Err(Error::InvalidPath("spacing must be positive"));
    }
    let sq = libm::sqrt(sample.len() as f64);
    let mut z = Vec::with_capacity(degrees.len());
    let mut var = Vec::with_capacity(degrees.len());
    for &j in &degrees {
        let s: f64 = sample.iter().map(|&x| eval_poly(&sys[j], x)).sum();
        let v = poly_variance(p, j, dt);
        z.push(s / sq / libm::sqrt(v));
        var.push(v);
    }
    let statistic: f64 = z.iter().map(|x| x * x).sum();
    let dof = degrees.len();
    if source == ParamsSource::Estimated {
        warnings.push(GofWarning::EstimatedParameters);
    }
    Ok(GofResult {
        statistic,
        dof,
        p_value: chi_square_sf(statistic, dof as f64)?,
        degrees,
        per_poly_z: z,
        variance_diag: var,
        params_source: source,
        dt,
        n: sample.len(),
        warnings,
    })
}

/// One condition E[Fⱼ] = 0, statistic χ²₁.
pub fn test_single(p: &FsParams, sample: &[f64], dt: f64, j: usize, source: ParamsSource) -> Result<GofResult> {
    let sys = build_system(p)?;
    let max = sys.len() - 1;
    if j == 0 || j > max {
        return Err(Error::IndexOutOfSystem { index: j, max });
    }
    run_test(p, sample, dt, alloc::vec![j], &sys, source, Vec::new())
}

/// Conditions j = 1..m jointly, statistic χ²ₘ with the diagonal covariance.
pub fn test_joint(p: &FsParams, sample: &[f64], dt: f64, m: usize, source: ParamsSource) -> Result<GofResult> {
    let sys = build_system(p)?;
    if m == 0 {
        return Err(Error::IndexOutOfSystem { index: 0, max: sys.len() - 1 });
    }
    let (used, warnings) = truncate(m, sys.len() - 1);
    run_test(p, sample, dt, (1..=used).collect(), &sys, source, warnings)
}

/// ∇_{(α,β)} ln 𝔣𝔰(x).
pub fn score(p: &FsParams, x: f64) -> Result<[f64; 2]> {
    let (a, b) = (p.alpha, p.beta);
    let s = a * x + b;
    let da = 0.5 * (digamma(a / 2.0)? - digamma((a + b) / 2.0)?);
    let db = 0.5 * (digamma((a + b) / 2.0)? - digamma(b / 2.0)?);
    Ok([
        (b * (1.0 - x) + s * libm::log(a * x / s)) / (2.0 * s) - da,
        (a * (x - 1.0) + s * libm::log(b / s)) / (2.0 * s) + db,
    ])
}

/// The score with (αx+β) multiplying the digamma differences.
pub fn score_as_printed(p: &FsParams, x: f64) -> Result<[f64; 2]> {
    let (a, b) = (p.alpha, p.beta);
    let s = a * x + b;
    let da = digamma(a / 2.0)? - digamma((a + b) / 2.0)?;
    let db = digamma((a + b) / 2.0)? - digamma(b / 2.0)?;
    Ok([
        (b * (1.0 - x) + s * libm::log(a * x / s)) / (2.0 * s) - s * da,
        (a * (x - 1.0) + s * libm::log(b / s)) / (2.0 * s) + s * db,
    ])
}

/// E[Fⱼ(X)·score_k(X)] for j = 1..=m (rows) and k ∈ {α, β} (columns).
pub fn robustness_integrals(p: &FsParams, m: usize) -> Result<Vec<[f64; 2]>> {
    let sys = build_system(p)?;
    let (used, _) = truncate(m, sys.len() - 1);
    let mut out = Vec::with_capacity(used);
    for f in &sys[1..=used] {
        let mut row = [0.0; 2];
        for (k, r) in row.iter_mut().enumerate() {
            *r = expect(p, |x| eval_poly(f, x) * score(p, x).map(|s| s[k]).unwrap_or(f64::NAN))?;
        }
        out.push(row);
    }
    Ok(out)
}
