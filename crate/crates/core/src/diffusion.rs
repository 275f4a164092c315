//! The diffusion dX = −θ(X − μ)dt + σ(X)dW with μ = β/(β−2): coefficients,
//! scale and speed, boundary classification, path simulation.

use alloc::string::String;
use alloc::vec::Vec;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::fsdist::{on_even_lattice, FsParams, FsSampler};
use crate::rng::stream_rng;

/// Floor applied to simulated values.
pub const POSITIVITY_FLOOR: f64 = 1e-12;
/// Largest admissible θ·dt.
pub const MAX_THETA_DT: f64 = 0.5;

/// μ(x) = −θ(x − β/(β−2)).
pub fn drift(p: &FsParams, x: f64) -> f64 {
    -p.theta * (x - p.mean())
}

/// σ²(x) = 4θx(αx+β)/(α(β−2)).
pub fn diffusion_sq(p: &FsParams, x: f64) -> f64 {
    4.0 * p.theta * x * (p.alpha * x + p.beta) / (p.alpha * (p.beta - 2.0))
}

pub fn diffusion_coeff(p: &FsParams, x: f64) -> f64 {
    libm::sqrt(diffusion_sq(p, x).max(0.0))
}

/// σσ′ = 2θ(2αx+β)/(α(β−2)).
pub fn sigma_sigma_prime(p: &FsParams, x: f64) -> f64 {
    2.0 * p.theta * (2.0 * p.alpha * x + p.beta) / (p.alpha * (p.beta - 2.0))
}

/// K = θ(β+2√α)²/(α(β−2)), bounding |μ(x)| ≤ K(1+|x|) and σ²(x) ≤ K(1+x²).
pub fn growth_constant(p: &FsParams) -> f64 {
    let s = p.beta + 2.0 * libm::sqrt(p.alpha);
    p.theta * s * s / (p.alpha * (p.beta - 2.0))
}

/// 𝔰(x) = x^{−α/2}(αx+β)^{α/2+β/2−1}.
pub fn scale_density(p: &FsParams, x: f64) -> f64 {
    libm::exp(ln_scale_density(p, x))
}

pub fn ln_scale_density(p: &FsParams, x: f64) -> f64 {
    let (a, b) = (p.alpha, p.beta);
    -0.5 * a * libm::log(x) + (0.5 * a + 0.5 * b - 1.0) * libm::log(a * x + b)
}

/// 𝔪(x) = α(β−2)/(2θ)·x^{α/2−1}(αx+β)^{−α/2−β/2}.
pub fn speed_density(p: &FsParams, x: f64) -> f64 {
    let (a, b) = (p.alpha, p.beta);
    a * (b - 2.0) / (2.0 * p.theta)
        * libm::exp((0.5 * a - 1.0) * libm::log(x) - (0.5 * a + 0.5 * b) * libm::log(a * x + b))
}

/// M = ∫𝔪 = α(β−2)/(2θ)·α^{−α/2}β^{−β/2}B(α/2, β/2).
pub fn speed_mass(p: &FsParams) -> f64 {
    let (a, b) = (p.alpha, p.beta);
    a * (b - 2.0) / (2.0 * p.theta) * libm::exp(-0.5 * a * libm::log(a) - 0.5 * b * libm::log(b) + p.ln_beta_fn())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize), serde(rename_all = "snake_case"))]
pub enum FellerType {
    Regular,
    Entrance,
    Natural,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize), serde(rename_all = "snake_case"))]
pub enum WeylType {
    LimitCircle,
    LimitPoint,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize), serde(rename_all = "snake_case"))]
pub enum Oscillation {
    NonOscillatory,
    Oscillatory,
}

/// Boundary behaviour at 0 and ∞.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BoundaryReport {
    pub left_feller: FellerType,
    pub right_feller: FellerType,
    pub left_lp_lc: WeylType,
    pub right_lp_lc: WeylType,
    pub cutoff_lambda: f64,
    pub left_osc: Oscillation,
    pub right_osc: String,
}

impl BoundaryReport {
    /// Oscillation type of ∞ at spectral parameter λ.
    pub fn right_osc_at(&self, lambda: f64) -> Oscillation {
        if lambda <= self.cutoff_lambda {
            Oscillation::NonOscillatory
        } else {
            Oscillation::Oscillatory
        }
    }
}

pub fn classify_boundaries(p: &FsParams) -> Result<BoundaryReport> {
    if on_even_lattice(p.alpha) {
        return Err(Error::UnclassifiedParameter { alpha: p.alpha });
    }
    Ok(BoundaryReport {
        left_feller: if p.alpha < 2.0 { FellerType::Regular } else { FellerType::Entrance },
        right_feller: FellerType::Natural,
        left_lp_lc: if p.alpha < 4.0 { WeylType::LimitCircle } else { WeylType::LimitPoint },
        right_lp_lc: WeylType::LimitPoint,
        cutoff_lambda: p.cutoff(),
        left_osc: Oscillation::NonOscillatory,
        right_osc: String::from("NO for λ ≤ Λ, O for λ > Λ"),
    })
}

/// E[X_t | X_0 = x0] = x0e^{−θt} + μ(1 − e^{−θt}).
pub fn cond_mean(p: &FsParams, x0: f64, t: f64) -> f64 {
    let e = libm::exp(-p.theta * t);
    x0 * e + p.mean() * (1.0 - e)
}

/// Autocorrelation e^{−θt}; needs a finite variance.
pub fn acf(p: &FsParams, t: f64) -> Result<f64> {
    if !p.finite_variance() {
        return Err(Error::MomentDoesNotExist { order: 2, beta: p.beta });
    }
    Ok(libm::exp(-p.theta * t.abs()))
}

/// Drift of the unit-diffusion transform, in the closed form
/// ((α−β−1)/2)√(θ/(β−2))·tanh(y√(βθ/(β−2))).
pub fn lamperti_drift(p: &FsParams, y: f64) -> f64 {
    let (a, b, th) = (p.alpha, p.beta, p.theta);
    0.5 * (a - b - 1.0) * libm::sqrt(th / (b - 2.0)) * libm::tanh(y * libm::sqrt(b * th / (b - 2.0)))
}

/// The unit-diffusion transform y = √((β−2)/θ)·asinh(√(αx/β)).
pub fn lamperti_transform(p: &FsParams, x: f64) -> f64 {
    libm::sqrt((p.beta - 2.0) / p.theta) * libm::asinh(libm::sqrt(p.alpha * x / p.beta))
}

/// Drift of Y = [`lamperti_transform`](X) by Itô's formula:
/// √(θ/(β−2))·(α − 1 − β sinh²u)/(2 sinh u cosh u), u = y√(θ/(β−2)), y > 0.
pub fn lamperti_drift_ito(p: &FsParams, y: f64) -> f64 {
    let r = libm::sqrt(p.theta / (p.beta - 2.0));
    let u = y * r;
    let (s, c) = (libm::sinh(u), libm::cosh(u));
    r * (p.alpha - 1.0 - p.beta * s * s) / (2.0 * s * c)
}

/// Discretization scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize), serde(rename_all = "kebab-case"))]
pub enum Scheme {
    Euler,
    Milstein,
    /// Exact mean reversion over each step with a variance-matched Gaussian
    /// increment; the stationary mean and variance are exact for every dt.
    ExactDrift,
}

impl Scheme {
    pub fn name(&self) -> &'static str {
        match self {
            Scheme::Euler => "euler",
            Scheme::Milstein => "milstein",
            Scheme::ExactDrift => "exact-drift",
        }
    }
}

/// Initial condition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Start {
    Stationary,
    At(f64),
}

/// Where a path came from.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize), serde(rename_all = "snake_case"))]
pub enum Origin {
    Simulated { seed: u64, scheme: Scheme },
    Ingested { file: String },
}

/// Observed or simulated trajectory on (0, ∞).
#[derive(Debug, Clone, PartialEq)]
pub struct SamplePath {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    /// Uniform spacing, if any.
    pub dt: Option<f64>,
    pub origin: Origin,
}

impl SamplePath {
    /// Validates positivity and strictly increasing times; detects a uniform grid.
    pub fn new(times: Vec<f64>, values: Vec<f64>, origin: Origin) -> Result<Self> {
        if times.len() != values.len() {
            return Err(Error::InvalidPath("times and values differ in length"));
        }
        if values.iter().any(|v| !(*v > 0.0) || !v.is_finite()) {
            return Err(Error::InvalidPath("values must be positive and finite"));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidPath("times must be strictly increasing"));
        }
        let dt = uniform_spacing(&times);
        Ok(SamplePath { times, values, dt, origin })
    }

    /// A unit-free sequence observed at spacing `dt`.
    pub fn from_values(values: Vec<f64>, dt: f64, origin: Origin) -> Result<Self> {
        if !(dt > 0.0) {
            return Err(Error::InvalidPath("spacing must be positive"));
        }
        let times = (0..values.len()).map(|i| i as f64 * dt).collect();
        let mut path = SamplePath::new(times, values, origin)?;
        path.dt = Some(dt);
        Ok(path)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

fn uniform_spacing(times: &[f64]) -> Option<f64> {
    if times.len() < 2 {
        return None;
    }
    let n = times.len() - 1;
    let h = (times[n] - times[0]) / n as f64;
    let tol = 1e-9 * h.abs().max(times[n].abs() * 1e-7);
    times.windows(2).all(|w| ((w[1] - w[0]) - h).abs() <= tol).then_some(h)
}

/// Counters collected while simulating.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SimStats {
    pub steps: u64,
    pub clamped: u64,
}

/// One-step propagator for a fixed (params, dt, scheme).
#[derive(Debug, Clone, Copy)]
pub struct Stepper {
    p: FsParams,
    dt: f64,
    sqdt: f64,
    scheme: Scheme,
    decay: f64,
    noise_scale: f64,
}

impl Stepper {
    pub fn new(p: &FsParams, dt: f64, scheme: Scheme) -> Result<Self> {
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::InvalidParams("dt must be positive"));
        }
        if p.theta * dt > MAX_THETA_DT {
            return Err(Error::StepTooLarge(p.theta * dt));
        }
        let decay = libm::exp(-p.theta * dt);
        let noise_scale = libm::sqrt(-libm::expm1(-2.0 * p.theta * dt) / (2.0 * p.theta));
        Ok(Stepper { p: *p, dt, sqdt: libm::sqrt(dt), scheme, decay, noise_scale })
    }

    /// Advances x by one step with standard normal z; returns the new value
    /// and whether it was clamped at the floor.
    #[inline]
    pub fn step(&self, x: f64, z: f64) -> (f64, bool) {
        let p = &self.p;
        let next = match self.scheme {
            Scheme::Euler => x + drift(p, x) * self.dt + diffusion_coeff(p, x) * self.sqdt * z,
            Scheme::Milstein => {
                let dw = self.sqdt * z;
                x + drift(p, x) * self.dt
                    + diffusion_coeff(p, x) * dw
                    + 0.5 * sigma_sigma_prime(p, x) * (dw * dw - self.dt)
            }
            Scheme::ExactDrift => {
                let m = p.mean();
                m + (x - m) * self.decay + diffusion_coeff(p, x) * self.noise_scale * z
            }
        };
        if next < POSITIVITY_FLOOR || next.is_nan() {
            (POSITIVITY_FLOOR, true)
        } else {
            (next, false)
        }
    }
}

fn check_simulable(p: &FsParams) -> Result<()> {
    if p.alpha < 2.0 {
        return Err(Error::InvalidParams("simulation needs alpha >= 2 (boundary 0 unattainable)"));
    }
    Ok(())
}

fn initial<R: Rng + ?Sized>(p: &FsParams, start: Start, rng: &mut R) -> Result<f64> {
    match start {
        Start::Stationary => Ok(FsSampler::new(p).draw(rng)),
        Start::At(x0) if x0 > 0.0 && x0.is_finite() => Ok(x0),
        Start::At(_) => Err(Error::InvalidParams("x0 must be positive")),
    }
}

/// Records `n_obs` values spaced `substeps` steps of size `dt` apart, the first
/// being the initial value.
pub fn simulate_observations<R: Rng + ?Sized>(
    p: &FsParams,
    start: Start,
    n_obs: usize,
    dt: f64,
    substeps: usize,
    scheme: Scheme,
    rng: &mut R,
) -> Result<(Vec<f64>, SimStats)> {
    check_simulable(p)?;
    let stepper = Stepper::new(p, dt, scheme)?;
    let substeps = substeps.max(1);
    let mut x = initial(p, start, rng)?;
    let mut out = Vec::with_capacity(n_obs);
    let mut stats = SimStats::default();
    if n_obs == 0 {
        return Ok((out, stats));
    }
    out.push(x);
    for _ in 1..n_obs {
        for _ in 0..substeps {
            let z: f64 = StandardNormal.sample(rng);
            let (nx, clamped) = stepper.step(x, z);
            x = nx;
            stats.clamped += clamped as u64;
        }
        stats.steps += substeps as u64;
        out.push(x);
    }
    Ok((out, stats))
}

/// Path on [0, t_end] with step dt, deterministic in `seed`.
pub fn simulate(p: &FsParams, start: Start, t_end: f64, dt: f64, scheme: Scheme, seed: u64) -> Result<SamplePath> {
    Ok(simulate_with_stats(p, start, t_end, dt, scheme, seed)?.0)
}

pub fn simulate_with_stats(
    p: &FsParams,
    start: Start,
    t_end: f64,
    dt: f64,
    scheme: Scheme,
    seed: u64,
) -> Result<(SamplePath, SimStats)> {
    if !(dt > 0.0) || !(t_end >= dt) {
        return Err(Error::InvalidParams("need dt > 0 and t_end >= dt"));
    }
    let n_steps = libm::round(t_end / dt) as usize;
    let mut rng = stream_rng(seed, 0);
    let (values, stats) = simulate_observations(p, start, n_steps + 1, dt, 1, scheme, &mut rng)?;
    let times = (0..values.len()).map(|i| i as f64 * dt).collect();
    let path = SamplePath { times, values, dt: Some(dt), origin: Origin::Simulated { seed, scheme } };
    Ok((path, stats))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(a: f64, b: f64, t: f64) -> FsParams {
        FsParams::new(a, b, t).unwrap()
    }

    #[test]
    fn coefficient_examples() {
        assert!((drift(&p(5.0, 6.0, 1.0), 3.0) + 1.5).abs() < 1e-15);
        assert!((diffusion_coeff(&p(4.0, 6.0, 1.0), 1.0) - 2.5f64.sqrt()).abs() < 1e-15);
        assert!((cond_mean(&p(5.0, 6.0, 0.5), 3.0, 2.0) - 2.051_819_161_757_163).abs() < 1e-12);
        assert!((acf(&p(5.0, 6.0, 0.5), 2.0).unwrap() - (-1.0f64).exp()).abs() < 1e-15);
        assert!(acf(&p(5.0, 4.0, 0.5), 2.0).is_err());
    }

    #[test]
    fn boundaries() {
        let r = classify_boundaries(&p(3.0, 10.0, 1.0)).unwrap();
        assert_eq!((r.left_feller, r.left_lp_lc), (FellerType::Entrance, WeylType::LimitCircle));
        assert_eq!(r.cutoff_lambda, 1.5625);
        let r = classify_boundaries(&p(5.0, 10.0, 1.0)).unwrap();
        assert_eq!((r.left_feller, r.left_lp_lc), (FellerType::Entrance, WeylType::LimitPoint));
        assert_eq!(classify_boundaries(&p(1.5, 10.0, 1.0)).unwrap().left_feller, FellerType::Regular);
        assert!(classify_boundaries(&p(6.0, 10.0, 1.0)).is_err());
        assert_eq!(r.right_osc_at(2.0), Oscillation::Oscillatory);
    }

    #[test]
    fn step_guard() {
        assert!(matches!(
            simulate(&p(5.0, 20.0, 1.0), Start::At(1.0), 10.0, 0.6, Scheme::Euler, 1),
            Err(Error::StepTooLarge(_))
        ));
    }

    #[test]
    fn lamperti_limits() {
        let q = p(5.0, 20.0, 1.0);
        assert_eq!(lamperti_drift(&q, 0.0), 0.0);
        assert!((lamperti_drift(&q, 0.7) + lamperti_drift(&q, -0.7)).abs() < 1e-15);
        let lim = 0.5 * (20.0 + 1.0 - 5.0) * (1.0f64 / 18.0).sqrt();
        assert!((lamperti_drift(&q, 1e3).abs() - lim).abs() < 1e-12);
    }
}
