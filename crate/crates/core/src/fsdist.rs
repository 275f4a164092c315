//! The Fisher-Snedecor law FS(α, β): density, moments, sampling, parameter regimes.

use alloc::vec::Vec;

use rand::Rng;
use rand_distr::{Distribution, Gamma};

use crate::error::{Error, Result};
use crate::rng::stream_rng;
use crate::specfun::{ln_beta, ln_gamma, reg_inc_beta};

/// Integer-lattice tolerance for α ∈ {4, 6, 8, ...}.
pub const LATTICE_TOL: f64 = 1e-8;

/// Parameters (α, β, θ) of the diffusion and of its invariant law.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FsParams {
    pub alpha: f64,
    pub beta: f64,
    pub theta: f64,
}

/// True when α is within tolerance of an even integer 2(m+1), m ≥ 0.
pub fn on_even_lattice(alpha: f64) -> bool {
    let half = alpha / 2.0;
    let r = libm::round(half);
    r >= 1.0 && (alpha - 2.0 * r).abs() < LATTICE_TOL
}

impl FsParams {
    /// Validates α > 0, β > 2, θ > 0.
    pub fn new(alpha: f64, beta: f64, theta: f64) -> Result<Self> {
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(Error::InvalidParams("alpha must be positive and finite"));
        }
        if !(beta > 2.0) || !beta.is_finite() {
            return Err(Error::InvalidParams("beta must exceed 2"));
        }
        if !(theta > 0.0) || !theta.is_finite() {
            return Err(Error::InvalidParams("theta must be positive and finite"));
        }
        Ok(FsParams { alpha, beta, theta })
    }

    pub fn with_theta(self, theta: f64) -> Result<Self> {
        FsParams::new(self.alpha, self.beta, theta)
    }

    pub fn ergodic(&self) -> bool {
        self.alpha > 2.0
    }

    pub fn finite_variance(&self) -> bool {
        self.beta > 4.0
    }

    pub fn covariance_ok(&self) -> bool {
        self.beta > 8.0
    }

    pub fn spectral_ok(&self) -> bool {
        self.alpha > 2.0 && !on_even_lattice(self.alpha)
    }

    /// Index of the last square-integrable polynomial eigenfunction: the
    /// largest n with 4n < β.
    pub fn system_size(&self) -> usize {
        let q = self.beta / 4.0;
        let f = libm::floor(q);
        if f == q {
            (f as usize).saturating_sub(1)
        } else {
            f as usize
        }
    }

    /// Λ = θβ²/(8(β−2)).
    pub fn cutoff(&self) -> f64 {
        self.theta * self.beta * self.beta / (8.0 * (self.beta - 2.0))
    }

    /// λₙ = θn(β−2n)/(β−2).
    pub fn eigenvalue(&self, n: usize) -> f64 {
        let n = n as f64;
        self.theta * n * (self.beta - 2.0 * n) / (self.beta - 2.0)
    }

    pub fn mean(&self) -> f64 {
        self.beta / (self.beta - 2.0)
    }

    pub fn ln_beta_fn(&self) -> f64 {
        ln_beta(self.alpha / 2.0, self.beta / 2.0).unwrap_or(f64::NAN)
    }
}

/// ln 𝔣𝔰(x), x > 0.
pub fn ln_pdf(p: &FsParams, x: f64) -> f64 {
    if !(x > 0.0) {
        return f64::NEG_INFINITY;
    }
    let (a, b) = (p.alpha, p.beta);
    let ax = a * x;
    let l_axb = libm::log(ax + b);
    0.5 * a * (libm::log(ax) - l_axb) + 0.5 * b * (libm::log(b) - l_axb) - libm::log(x) - p.ln_beta_fn()
}

/// Density 𝔣𝔰(x) of FS(α, β).
pub fn pdf(p: &FsParams, x: f64) -> f64 {
    if x < 0.0 || x.is_nan() {
        return 0.0;
    }
    if x == 0.0 {
        return if p.alpha > 2.0 {
            0.0
        } else if p.alpha == 2.0 {
            // (α/β)^{α/2} / B(α/2, β/2) at α = 2
            libm::exp(libm::log(p.alpha / p.beta) - p.ln_beta_fn())
        } else {
            f64::INFINITY
        };
    }
    libm::exp(ln_pdf(p, x))
}

/// Distribution function via the regularized incomplete beta function.
pub fn cdf(p: &FsParams, x: f64) -> f64 {
    if !(x > 0.0) {
        return 0.0;
    }
    let ax = p.alpha * x;
    reg_inc_beta(p.alpha / 2.0, p.beta / 2.0, ax / (ax + p.beta)).unwrap_or(f64::NAN)
}

fn check_moment(p: &FsParams, n: u32) -> Result<()> {
    if p.beta > 2.0 * n as f64 {
        Ok(())
    } else {
        Err(Error::MomentDoesNotExist { order: n, beta: p.beta })
    }
}

/// E[Xⁿ] = (β/α)ⁿ Γ(α/2+n)Γ(β/2−n)/(Γ(α/2)Γ(β/2)).
pub fn moment(p: &FsParams, n: u32) -> Result<f64> {
    check_moment(p, n)?;
    if n == 0 {
        return Ok(1.0);
    }
    let (a2, b2) = (p.alpha / 2.0, p.beta / 2.0);
    let nf = n as f64;
    let lg = ln_gamma(a2 + nf)? + ln_gamma(b2 - nf)? - ln_gamma(a2)? - ln_gamma(b2)?;
    Ok(libm::exp(nf * libm::log(p.beta / p.alpha) + lg))
}

/// E[Xⁿ] by iterating
/// (2(k+2)/(β+2) − 1) E[X^{k+1}] = −(β(α−2) + 2β(k+1))/(α(β+2)) E[X^k].
pub fn moment_by_recurrence(p: &FsParams, n: u32) -> Result<f64> {
    check_moment(p, n)?;
    let (a, b) = (p.alpha, p.beta);
    let mut m = 1.0;
    for k in 0..n {
        let k = k as f64;
        let lhs = 2.0 * (k + 2.0) / (b + 2.0) - 1.0;
        let rhs = -(b * (a - 2.0) + 2.0 * b * (k + 1.0)) / (a * (b + 2.0));
        m *= rhs / lhs;
    }
    Ok(m)
}

/// (E[X], Var X).
pub fn mean_var(p: &FsParams) -> Result<(f64, f64)> {
    check_moment(p, 2)?;
    let (a, b) = (p.alpha, p.beta);
    let mean = b / (b - 2.0);
    let var = 2.0 * b * b * (a + b - 2.0) / (a * (b - 2.0) * (b - 2.0) * (b - 4.0));
    Ok((mean, var))
}

/// Draws from FS(α, β) as (β/α)·G₁/G₂ with Gamma(α/2) and Gamma(β/2) variates.
#[derive(Debug, Clone, Copy)]
pub struct FsSampler {
    g1: Gamma<f64>,
    g2: Gamma<f64>,
    ratio: f64,
}

impl FsSampler {
    pub fn new(p: &FsParams) -> Self {
        FsSampler {
            g1: Gamma::new(p.alpha / 2.0, 1.0).expect("alpha > 0"),
            g2: Gamma::new(p.beta / 2.0, 1.0).expect("beta > 0"),
            ratio: p.beta / p.alpha,
        }
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let x = self.g1.sample(rng);
        let y = self.g2.sample(rng);
        self.ratio * x / y
    }
}

/// n i.i.d. draws, deterministic in `seed`.
pub fn sample(p: &FsParams, n: usize, seed: u64) -> Vec<f64> {
    let mut rng = stream_rng(seed, 0);
    let s = FsSampler::new(p);
    (0..n).map(|_| s.draw(&mut rng)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(FsParams::new(0.0, 10.0, 1.0).is_err());
        assert!(FsParams::new(1.0, 2.0, 1.0).is_err());
        assert!(FsParams::new(1.0, 10.0, 0.0).is_err());
        let p = FsParams::new(4.0 + 1e-10, 10.0, 1.0).unwrap();
        assert!(!p.spectral_ok());
        assert!(FsParams::new(5.0, 10.0, 1.0).unwrap().spectral_ok());
        assert!(!FsParams::new(1.5, 10.0, 1.0).unwrap().spectral_ok());
    }

    #[test]
    fn system_size_lattice() {
        let n = |b: f64| FsParams::new(5.0, b, 1.0).unwrap().system_size();
        assert_eq!(n(20.0), 4);
        assert_eq!(n(12.0), 2);
        assert_eq!(n(30.0), 7);
        assert_eq!(n(21.0), 5);
        assert_eq!(n(4.5), 1);
    }

    #[test]
    fn pdf_at_zero() {
        let p = FsParams::new(2.0, 4.0, 1.0).unwrap();
        assert!((pdf(&p, 0.0) - 1.0).abs() < 1e-14);
        // 64/(2x+4)^3 at α=2, β=4
        assert!((pdf(&p, 1.5) - 64.0 / 343.0).abs() < 1e-14);
        assert_eq!(pdf(&FsParams::new(5.0, 20.0, 1.0).unwrap(), 0.0), 0.0);
    }

    #[test]
    fn moment_examples() {
        let p = FsParams::new(4.0, 6.0, 1.0).unwrap();
        assert_eq!(moment(&p, 0).unwrap(), 1.0);
        assert!((moment(&p, 1).unwrap() - 1.5).abs() < 1e-14);
        assert!((moment(&p, 2).unwrap() - 6.75).abs() < 1e-13);
        assert!(moment(&p, 3).is_err());
        let (m, v) = mean_var(&p).unwrap();
        assert!((m - 1.5).abs() < 1e-15 && (v - 4.5).abs() < 1e-14);
    }

    #[test]
    fn recurrence_matches_closed_form() {
        let p = FsParams::new(4.0, 10.0, 1.0).unwrap();
        let a = moment(&p, 2).unwrap();
        let b = moment_by_recurrence(&p, 2).unwrap();
        assert!((a - b).abs() < 1e-12 * a);
        assert!((a - 3.125).abs() < 1e-12);
    }

    #[test]
    fn sampling_is_deterministic() {
        let p = FsParams::new(5.0, 20.0, 1.0).unwrap();
        assert_eq!(sample(&p, 100, 7), sample(&p, 100, 7));
        assert_ne!(sample(&p, 100, 7), sample(&p, 100, 8));
    }
}
