//! Spectral representation of the transition density.
//!
//! p(x; x₀, t) = 𝔣𝔰(x)·[Σₙ e^{−λₙt}Fₙ(x₀)Fₙ(x) + ∫_Λ^∞ ρ(λ)e^{−λt}f₁(x₀,λ)f₁(x,λ)dλ]
//!
//! The continuous part is integrated in k, λ = Λ + 2θk²/(β−2), where the
//! spectral weight per unit k is bounded and the exponential damping sets a
//! natural truncation point.

pub mod eigenfn;

use alloc::vec::Vec;
use core::sync::atomic::{AtomicU64, Ordering};

pub use eigenfn::{
    f1, f1_complex_series, f1_on_grid, f1_with_derivative, f4, f4_with_derivative, lambda_star, wronskian_closed_form,
    wronskian_over_scale, ContinuationCoeffs, F1Solver,
};

use crate::error::{Error, Result};
use crate::fsdist::{pdf, FsParams};
use crate::fspoly::{build_system, eval_poly, FsPolynomial};
use crate::quad::{GaussLegendre, HalfLineGrid};
use crate::specfun::ln_abs_gamma_complex;

/// Normalization of the continuous spectral weight.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize), serde(rename_all = "snake_case"))]
pub enum WeightNorm {
    /// ρ(λ) = (β−2)/(2θπ)·k·B(α/2,β/2)·|Γ(−β/4+ik)Γ(α/2+β/4+ik)/(Γ(α/2)Γ(1+2ik))|²
    Derived,
    /// The same without the factor (β−2)/(2θ).
    AsPrinted,
}

/// Discretization of the k-integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KQuadConfig {
    /// Truncate where ck²t exceeds this.
    pub tail_exponent: f64,
    pub panel_width: f64,
    pub order: usize,
}

impl Default for KQuadConfig {
    fn default() -> Self {
        KQuadConfig { tail_exponent: 36.0, panel_width: 0.5, order: 16 }
    }
}

/// Nodes of the continuous-spectrum integral.
#[derive(Debug, Clone)]
pub struct KRule {
    pub k: Vec<f64>,
    pub lambda: Vec<f64>,
    /// Quadrature weight times spectral weight, per unit k.
    pub weight: Vec<f64>,
}

impl KRule {
    pub fn len(&self) -> usize {
        self.k.len()
    }

    pub fn is_empty(&self) -> bool {
        self.k.is_empty()
    }
}

/// Eigenfunction values at a fixed set of points.
#[derive(Debug, Clone)]
pub struct Basis {
    pub nodes: Vec<f64>,
    pub pdf: Vec<f64>,
    /// `polys[n][i]` = Fₙ(nodes[i]).
    pub polys: Vec<Vec<f64>>,
    /// `f1[j][i]` = f₁(nodes[i], λ_j) for the k-nodes of the rule.
    pub f1: Vec<Vec<f64>>,
}

/// Discrete and continuous parts of p(x; x₀, t).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityParts {
    pub x: f64,
    pub p_d: f64,
    pub p_c: f64,
    /// max(p_d + p_c, 0).
    pub p: f64,
    pub floored: bool,
}

/// Precomputed eigen-structure for one parameter set.
#[derive(Debug)]
pub struct SpectralContext {
    pub params: FsParams,
    pub n_max: usize,
    pub eigenvalues: Vec<f64>,
    pub cutoff: f64,
    pub polys: Vec<FsPolynomial>,
    pub weight_norm: WeightNorm,
    pub kquad: KQuadConfig,
    floor_events: AtomicU64,
}

impl Clone for SpectralContext {
    fn clone(&self) -> Self {
        SpectralContext {
            params: self.params,
            n_max: self.n_max,
            eigenvalues: self.eigenvalues.clone(),
            cutoff: self.cutoff,
            polys: self.polys.clone(),
            weight_norm: self.weight_norm,
            kquad: self.kquad,
            floor_events: AtomicU64::new(self.floor_events.load(Ordering::Relaxed)),
        }
    }
}

impl SpectralContext {
    pub fn new(p: &FsParams) -> Result<Self> {
        if !p.spectral_ok() {
            return Err(Error::SpectralHypothesisViolated { alpha: p.alpha });
        }
        let polys = build_system(p)?;
        Ok(SpectralContext {
            params: *p,
            n_max: polys.len() - 1,
            eigenvalues: polys.iter().map(|f| f.eigenvalue).collect(),
            cutoff: p.cutoff(),
            polys,
            weight_norm: WeightNorm::Derived,
            kquad: KQuadConfig::default(),
            floor_events: AtomicU64::new(0),
        })
    }

    pub fn with_weight(mut self, w: WeightNorm) -> Self {
        self.weight_norm = w;
        self
    }

    /// Number of densities clamped at zero so far.
    pub fn floor_events(&self) -> u64 {
        self.floor_events.load(Ordering::Relaxed)
    }

    /// c in λ = Λ + ck².
    pub fn k_scale(&self) -> f64 {
        2.0 * self.params.theta / (self.params.beta - 2.0)
    }

    pub fn lambda_of_k(&self, k: f64) -> f64 {
        self.cutoff + self.k_scale() * k * k
    }

    /// Spectral weight per unit λ at λ = Λ + ck².
    pub fn weight_per_lambda(&self, k: f64) -> Result<f64> {
        let p = &self.params;
        let (a, b) = (p.alpha, p.beta);
        let ln_mod = ln_abs_gamma_complex(-b / 4.0, k)? + ln_abs_gamma_complex(a / 2.0 + b / 4.0, k)?
            - crate::specfun::ln_gamma(a / 2.0)?
            - ln_abs_gamma_complex(1.0, 2.0 * k)?;
        let base = k / core::f64::consts::PI * libm::exp(p.ln_beta_fn() + 2.0 * ln_mod);
        Ok(match self.weight_norm {
            WeightNorm::Derived => base / self.k_scale(),
            WeightNorm::AsPrinted => base,
        })
    }

    /// Spectral weight per unit k, ρ(λ(k))·2ck.
    pub fn weight_per_k(&self, k: f64) -> Result<f64> {
        Ok(self.weight_per_lambda(k)? * 2.0 * self.k_scale() * k)
    }

    /// k-nodes adequate for all times ≥ `t_min`.
    pub fn k_rule(&self, t_min: f64) -> Result<KRule> {
        if !(t_min > 0.0) {
            return Err(Error::Domain { what: "time (t > 0)", value: t_min });
        }
        let cfg = self.kquad;
        let k_max = libm::sqrt(cfg.tail_exponent / (self.k_scale() * t_min));
        let mut breaks: Vec<f64> = alloc::vec![0.0, 1e-3, 1e-2, 0.05, 0.2, 0.5];
        breaks.retain(|&b| b < k_max);
        let mut last = *breaks.last().unwrap_or(&0.0);
        while last < k_max {
            last = (last + cfg.panel_width).min(k_max);
            breaks.push(last);
        }
        let gl = GaussLegendre::new(cfg.order);
        let mut ks = Vec::new();
        let mut ws = Vec::new();
        for w in breaks.windows(2) {
            gl.push_mapped(w[0], w[1], &mut ks, &mut ws);
        }
        let mut weight = Vec::with_capacity(ks.len());
        for (k, w) in ks.iter().zip(&ws) {
            weight.push(w * self.weight_per_k(*k)?);
        }
        let lambda = ks.iter().map(|&k| self.lambda_of_k(k)).collect();
        Ok(KRule { k: ks, lambda, weight })
    }

    pub fn basis(&self, nodes: &[f64], rule: &KRule) -> Result<Basis> {
        let p = &self.params;
        let polys = self.polys.iter().map(|f| nodes.iter().map(|&x| eval_poly(f, x)).collect()).collect();
        let mut f1 = Vec::with_capacity(rule.len());
        for &lam in &rule.lambda {
            f1.push(f1_on_grid(p, lam, nodes)?);
        }
        Ok(Basis { nodes: nodes.to_vec(), pdf: nodes.iter().map(|&x| pdf(p, x)).collect(), polys, f1 })
    }

    /// Discrete and continuous parts of K(x, y, t) = p(x; y, t)/𝔣𝔰(x) for
    /// x = a.nodes[i], y = b.nodes[j].
    pub fn kernel(&self, rule: &KRule, a: &Basis, i: usize, b: &Basis, j: usize, t: f64) -> (f64, f64) {
        let mut kd = 0.0;
        for (n, lam) in self.eigenvalues.iter().enumerate() {
            kd += libm::exp(-lam * t) * a.polys[n][i] * b.polys[n][j];
        }
        let mut kc = 0.0;
        for (q, (w, lam)) in rule.weight.iter().zip(&rule.lambda).enumerate() {
            kc += w * libm::exp(-lam * t) * a.f1[q][i] * b.f1[q][j];
        }
        (kd, kc)
    }

    fn parts(&self, x: f64, fx: f64, kd: f64, kc: f64) -> DensityParts {
        let p_d = fx * kd;
        let p_c = fx * kc;
        let s = p_d + p_c;
        let floored = s < 0.0;
        if floored {
            self.floor_events.fetch_add(1, Ordering::Relaxed);
        }
        DensityParts { x, p_d, p_c, p: s.max(0.0), floored }
    }

    fn check_t(t: f64) -> Result<()> {
        if t > 0.0 && t.is_finite() {
            Ok(())
        } else {
            Err(Error::Domain { what: "time (t > 0)", value: t })
        }
    }

    pub fn transition_density_parts(&self, x: f64, x0: f64, t: f64) -> Result<DensityParts> {
        Self::check_t(t)?;
        if !(x > 0.0) || !(x0 > 0.0) {
            return Err(Error::Domain { what: "state (x > 0)", value: x.min(x0) });
        }
        let rule = self.k_rule(t)?;
        let b = self.basis(&[x, x0], &rule)?;
        let (kd, kc) = self.kernel(&rule, &b, 0, &b, 1, t);
        Ok(self.parts(x, b.pdf[0], kd, kc))
    }

    /// p(x; x₀, t).
    pub fn transition_density(&self, x: f64, x0: f64, t: f64) -> Result<f64> {
        self.transition_density_parts(x, x0, t).map(|d| d.p)
    }

    /// p(x; x₀, t) at every x of `xs`.
    pub fn density_on_grid(&self, x0: f64, t: f64, xs: &[f64]) -> Result<Vec<DensityParts>> {
        Self::check_t(t)?;
        if !(x0 > 0.0) {
            return Err(Error::Domain { what: "state (x0 > 0)", value: x0 });
        }
        if let Some(bad) = xs.iter().find(|x| !(**x > 0.0)) {
            return Err(Error::Domain { what: "state (x > 0)", value: *bad });
        }
        let rule = self.k_rule(t)?;
        let start = self.basis(&[x0], &rule)?;
        let grid = self.basis(xs, &rule)?;
        Ok((0..xs.len())
            .map(|i| {
                let (kd, kc) = self.kernel(&rule, &grid, i, &start, 0, t);
                self.parts(xs[i], grid.pdf[i], kd, kc)
            })
            .collect())
    }

    /// Stationary joint density of (X_{s+t}, X_s) at (x, y): 𝔣𝔰(y)p(x; y, t).
    pub fn two_dim_density(&self, x: f64, y: f64, t: f64) -> Result<f64> {
        Ok(pdf(&self.params, y) * self.transition_density(x, y, t)?)
    }

    /// E[Fᵢ(X_{s+t})Fⱼ(X_s)] = e^{−λⱼt}δᵢⱼ.
    pub fn cross_poly_moment(&self, i: usize, j: usize, t: f64) -> Result<f64> {
        let max = self.n_max;
        if i > max || j > max {
            return Err(Error::IndexOutOfSystem { index: i.max(j), max });
        }
        if !(self.params.beta > 2.0 * (i + j) as f64) {
            return Err(Error::MomentDoesNotExist { order: (i + j) as u32, beta: self.params.beta });
        }
        Ok(if i == j { libm::exp(-self.eigenvalues[j] * t) } else { 0.0 })
    }

    /// E[Fᵢ(X_{s+t})Fⱼ(X_s)] by double quadrature of Fᵢ(x)Fⱼ(y)𝔣𝔰(y)p(x; y, t)
    /// over `grid`. The kernel is separable, so the double sum factors
    /// through each eigenfunction.
    pub fn cross_poly_moment_quadrature(&self, i: usize, j: usize, t: f64, grid: &HalfLineGrid) -> Result<f64> {
        Self::check_t(t)?;
        let max = self.n_max;
        if i > max || j > max {
            return Err(Error::IndexOutOfSystem { index: i.max(j), max });
        }
        let rule = self.k_rule(t)?;
        let b = self.basis(&grid.nodes, &rule)?;
        let proj = |row: &[f64], n: usize| -> f64 {
            grid.weights.iter().enumerate().map(|(q, w)| w * b.pdf[q] * row[q] * b.polys[n][q]).sum::<f64>()
        };
        let mut total = 0.0;
        for (n, lam) in self.eigenvalues.iter().enumerate() {
            total += libm::exp(-lam * t) * proj(&b.polys[n], i) * proj(&b.polys[n], j);
        }
        for (q, (w, lam)) in rule.weight.iter().zip(&rule.lambda).enumerate() {
            total += w * libm::exp(-lam * t) * proj(&b.f1[q], i) * proj(&b.f1[q], j);
        }
        Ok(total)
    }

    /// ∫|p_c(x; x₀, t)|dx over `grid`.
    pub fn continuous_mass(&self, x0: f64, t: f64, grid: &HalfLineGrid) -> Result<f64> {
        let d = self.density_on_grid(x0, t, &grid.nodes)?;
        Ok(grid.weights.iter().zip(&d).map(|(w, q)| w * q.p_c.abs()).sum())
    }
}

/// The quadrature grid used for spectral integrals in x.
pub fn default_grid(p: &FsParams) -> HalfLineGrid {
    HalfLineGrid::new(p.mean(), 12, 14, 2, 16)
}

/// (E[X_{s+t}X_s], E[X_{s+t}X_s²], E[X²_{s+t}X²_s]) in closed form.
pub fn cross_raw_moments(p: &FsParams, t: f64) -> Result<(f64, f64, f64)> {
    if !p.covariance_ok() {
        return Err(Error::MomentDoesNotExist { order: 4, beta: p.beta });
    }
    let (a, b, th) = (p.alpha, p.beta, p.theta);
    let e1 = libm::exp(-th * t);
    let e2 = libm::exp(-2.0 * th * (b - 4.0) / (b - 2.0) * t);
    let b2 = b * b;
    let b3 = b2 * b;
    let b4 = b2 * b2;
    let m11 = (2.0 * b2 * (a + b - 2.0) / (a * (b - 4.0)) * e1 + b2) / ((b - 2.0) * (b - 2.0));
    let m12 = b3 * (a + 2.0) / (a * a * (b - 2.0) * (b - 2.0) * (b - 4.0) * (b - 6.0))
        * (4.0 * (a + b - 2.0) * e1 + a * (b - 6.0));
    let m22 = 8.0 * b4 * (a + 2.0) * (a + b - 2.0) * (a + b - 4.0)
        / (a * a * a * (b - 2.0) * (b - 4.0) * (b - 4.0) * (b - 6.0) * (b - 6.0) * (b - 8.0))
        * e2
        + 8.0 * b4 * (a + 2.0) * (a + 2.0) * (a + b - 2.0)
            / (a * a * a * (b - 2.0) * (b - 2.0) * (b - 4.0) * (b - 6.0) * (b - 6.0))
            * e1
        + b4 * (a + 2.0) * (a + 2.0) / (a * a * (b - 2.0) * (b - 2.0) * (b - 4.0) * (b - 4.0));
    Ok((m11, m12, m22))
}
