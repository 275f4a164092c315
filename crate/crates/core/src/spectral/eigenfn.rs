//! Solutions of the eigenvalue equation 𝒢f = −λf.
//!
//! In y = αx/β the equation reads
//! y(y+1)v″ + (α/2 + (1−β/2)y)v′ + λ*v = 0, λ* = λ(β−2)/(2θ),
//! with z± = −β/4 ± Δ the roots of z² + (β/2)z + λ* = 0.
//!
//! f₁ = ₂F₁(z₊, z₋; α/2; −y) is evaluated in real arithmetic for every λ: the
//! series coefficients (z₊)ⱼ(z₋)ⱼ are real even when z± are complex. The power
//! series is summed near the origin and continued outward by Taylor steps of
//! the equation itself.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fsdist::FsParams;
use crate::specfun::{gamma_complex, hyp2f1, hyp2f1_series_complex, Hyp2F1Args};

const SERIES_CAP: usize = 4000;
const TAYLOR_CAP: usize = 400;
const TOL: f64 = 1e-17;

/// λ* = λ(β−2)/(2θ).
pub fn lambda_star(p: &FsParams, lambda: f64) -> f64 {
    lambda * (p.beta - 2.0) / (2.0 * p.theta)
}

/// The parameters z±, u± = 1 − α/2 + z±, Δ and the connection constants
/// B, A of f₁ = B f₃ + A f₄, at spectral parameter λ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContinuationCoeffs {
    pub z_plus: Complex64,
    pub z_minus: Complex64,
    pub u_plus: Complex64,
    pub u_minus: Complex64,
    /// Δ = √(β²/16 − λ*): real below the cutoff, imaginary above.
    pub delta: Complex64,
    pub b_coef: Complex64,
    pub a_coef: Complex64,
    /// k = −iΔ, real and positive above the cutoff (zero otherwise).
    pub k: f64,
}

impl ContinuationCoeffs {
    pub fn new(p: &FsParams, lambda: f64) -> Result<Self> {
        let ls = lambda_star(p, lambda);
        let disc = p.beta * p.beta / 16.0 - ls;
        let delta = if disc >= 0.0 {
            Complex64::new(libm::sqrt(disc), 0.0)
        } else {
            Complex64::new(0.0, libm::sqrt(-disc))
        };
        let q = Complex64::new(-p.beta / 4.0, 0.0);
        let z_plus = q + delta;
        let z_minus = q - delta;
        let shift = 1.0 - p.alpha / 2.0;
        let u_plus = z_plus + shift;
        let u_minus = z_minus + shift;
        let ga = Complex64::new(crate::specfun::gamma(p.alpha / 2.0)?, 0.0);
        let one = Complex64::new(1.0, 0.0);
        let b_coef = ga * gamma_complex(2.0 * delta)? * rgamma_c(z_plus)? * rgamma_c(one - u_minus)?;
        let a_coef = ga * gamma_complex(-2.0 * delta)? * rgamma_c(z_minus)? * rgamma_c(one - u_plus)?;
        let k = if disc < 0.0 { delta.im } else { 0.0 };
        Ok(ContinuationCoeffs { z_plus, z_minus, u_plus, u_minus, delta, b_coef, a_coef, k })
    }
}

// 1/Γ(z), zero at the poles
fn rgamma_c(z: Complex64) -> Result<Complex64> {
    match gamma_complex(z) {
        Ok(g) => Ok(Complex64::new(1.0, 0.0) / g),
        Err(Error::Pole(_)) => Ok(Complex64::new(0.0, 0.0)),
        Err(e) => Err(e),
    }
}

/// (v, dv/dy) from the power series at y.
fn series_at(ls: f64, c: f64, half_beta: f64, y: f64) -> Result<(f64, f64)> {
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut dsum = 0.0;
    for j in 0..SERIES_CAP {
        let jf = j as f64;
        term *= (jf * jf - jf * half_beta + ls) / ((c + jf) * (jf + 1.0)) * (-y);
        sum += term;
        dsum += (jf + 1.0) * term;
        if term == 0.0 || (jf > 2.0 && term.abs() * (jf + 2.0) <= TOL * (sum.abs() + dsum.abs())) {
            return Ok((sum, if y > 0.0 { dsum / y } else { -ls / c }));
        }
    }
    Err(Error::NonconvergentSeries { terms: SERIES_CAP })
}

/// Integrator of the y-equation for one λ*.
#[derive(Debug, Clone, Copy)]
pub struct F1Solver {
    ls: f64,
    c: f64,
    half_beta: f64,
    y_series: f64,
    max_rel_step: f64,
}

impl F1Solver {
    pub fn new(p: &FsParams, lambda: f64) -> Self {
        let ls = lambda_star(p, lambda);
        let c = p.alpha / 2.0;
        let y_series = (0.1 * (c + 1.0) / (ls.abs() + 1.0)).min(0.25);
        let max_rel_step = if ls > 1.0 { (1.0 / libm::sqrt(ls)).min(0.3) } else { 0.3 };
        F1Solver { ls, c, half_beta: p.beta / 2.0, y_series, max_rel_step }
    }

    /// Advances (v, v′) from y by h with a Taylor expansion about y.
    fn taylor_step(&self, y: f64, v: f64, dv: f64, h: f64) -> (f64, f64) {
        let p0 = y * (y + 1.0);
        let p1 = 2.0 * y + 1.0;
        let q0 = self.c + (1.0 - self.half_beta) * y;
        let q1 = 1.0 - self.half_beta;
        // scaled coefficients b_n = a_n h^n
        let mut b0 = v;
        let mut b1 = dv * h;
        let mut val = b0 + b1;
        let mut der = b1;
        let mut small = 0;
        for n in 0..TAYLOR_CAP {
            let nf = n as f64;
            let b2 = -((p1 * nf * (nf + 1.0) + q0 * (nf + 1.0)) * b1 * h
                + (nf * (nf - 1.0) + q1 * nf + self.ls) * b0 * h * h)
                / (p0 * (nf + 2.0) * (nf + 1.0));
            val += b2;
            der += (nf + 2.0) * b2;
            if b2.abs() * (nf + 3.0) <= TOL * (val.abs() + der.abs()) {
                small += 1;
                if small >= 2 {
                    break;
                }
            } else {
                small = 0;
            }
            b0 = b1;
            b1 = b2;
        }
        (val, der / h)
    }

    fn march(&self, mut y: f64, mut v: f64, mut dv: f64, target: f64) -> (f64, f64, f64) {
        while y < target {
            let h = (y * self.max_rel_step).min(target - y);
            let (nv, ndv) = self.taylor_step(y, v, dv, h);
            v = nv;
            dv = ndv;
            y = if target - y <= h { target } else { y + h };
        }
        (y, v, dv)
    }

    /// (v(y), v′(y)).
    pub fn eval(&self, y: f64) -> Result<(f64, f64)> {
        if !(y >= 0.0) || !y.is_finite() {
            return Err(Error::Domain { what: "f1 (x > 0)", value: y });
        }
        if y <= self.y_series {
            return series_at(self.ls, self.c, self.half_beta, y);
        }
        let (v, dv) = series_at(self.ls, self.c, self.half_beta, self.y_series)?;
        let (_, v, dv) = self.march(self.y_series, v, dv, y);
        Ok((v, dv))
    }

    /// Values at ascending ys, marching through them in order.
    pub fn eval_sorted(&self, ys: &[f64], out: &mut Vec<f64>) -> Result<()> {
        out.clear();
        let mut state: Option<(f64, f64, f64)> = None;
        for &y in ys {
            if !(y >= 0.0) || !y.is_finite() {
                return Err(Error::Domain { what: "f1 (x > 0)", value: y });
            }
            if y <= self.y_series {
                out.push(series_at(self.ls, self.c, self.half_beta, y)?.0);
                continue;
            }
            let (y0, v0, dv0) = match state {
                Some(s) => s,
                None => {
                    let (v, dv) = series_at(self.ls, self.c, self.half_beta, self.y_series)?;
                    (self.y_series, v, dv)
                }
            };
            let s = self.march(y0, v0, dv0, y);
            out.push(s.1);
            state = Some(s);
        }
        Ok(())
    }
}

/// f₁(x, −λ) = ₂F₁(z₊, z₋; α/2; −αx/β).
pub fn f1(p: &FsParams, lambda: f64, x: f64) -> Result<f64> {
    F1Solver::new(p, lambda).eval(p.alpha * x / p.beta).map(|r| r.0)
}

/// (f₁, df₁/dx).
pub fn f1_with_derivative(p: &FsParams, lambda: f64, x: f64) -> Result<(f64, f64)> {
    let s = p.alpha / p.beta;
    F1Solver::new(p, lambda).eval(s * x).map(|(v, dv)| (v, s * dv))
}

/// f₁ at many points (any order).
pub fn f1_on_grid(p: &FsParams, lambda: f64, xs: &[f64]) -> Result<Vec<f64>> {
    let s = p.alpha / p.beta;
    let mut idx: Vec<usize> = (0..xs.len()).collect();
    idx.sort_by(|&i, &j| xs[i].total_cmp(&xs[j]));
    let ys: Vec<f64> = idx.iter().map(|&i| s * xs[i]).collect();
    let mut sorted = Vec::with_capacity(xs.len());
    F1Solver::new(p, lambda).eval_sorted(&ys, &mut sorted)?;
    let mut out = alloc::vec![0.0; xs.len()];
    for (pos, &i) in idx.iter().enumerate() {
        out[i] = sorted[pos];
    }
    Ok(out)
}

/// f₁ by the complex-parameter power series; needs αx < β.
pub fn f1_complex_series(p: &FsParams, lambda: f64, x: f64) -> Result<Complex64> {
    let disc = p.beta * p.beta / 16.0 - lambda_star(p, lambda);
    let delta = if disc >= 0.0 {
        Complex64::new(libm::sqrt(disc), 0.0)
    } else {
        Complex64::new(0.0, libm::sqrt(-disc))
    };
    let q = Complex64::new(-p.beta / 4.0, 0.0);
    hyp2f1_series_complex(q + delta, q - delta, p.alpha / 2.0, -p.alpha * x / p.beta)
}

fn real_below_cutoff(p: &FsParams, lambda: f64) -> Result<(f64, f64, f64)> {
    let ls = lambda_star(p, lambda);
    let disc = p.beta * p.beta / 16.0 - ls;
    if disc < 0.0 {
        return Err(Error::Domain { what: "f4 (lambda below the cutoff)", value: lambda });
    }
    let delta = libm::sqrt(disc);
    let zp = -p.beta / 4.0 + delta;
    let up = 1.0 - p.alpha / 2.0 + zp;
    Ok((zp, up, delta))
}

/// (f₄, df₄/dx) with f₄ = Y^{−z₊} ₂F₁(z₊, u₊; 1+2Δ; −1/Y), Y = αx/β > 1.
pub fn f4_with_derivative(p: &FsParams, lambda: f64, x: f64) -> Result<(f64, f64)> {
    let yy = p.alpha * x / p.beta;
    if !(yy > 1.0) {
        return Err(Error::OutsideConvergence);
    }
    let (zp, up, delta) = real_below_cutoff(p, lambda)?;
    let c = 1.0 + 2.0 * delta;
    let w = -1.0 / yy;
    let f = hyp2f1(Hyp2F1Args::new(zp, up, c, w))?;
    let df = zp * up / c * hyp2f1(Hyp2F1Args::new(zp + 1.0, up + 1.0, c + 1.0, w))?;
    let pw = libm::pow(yy, -zp);
    let val = pw * f;
    // d/dY [Y^{−z} F(−1/Y)] = −z Y^{−z−1} F + Y^{−z−2} F′
    let dval_dy = -zp * pw / yy * f + pw / (yy * yy) * df;
    Ok((val, dval_dy * p.alpha / p.beta))
}

/// The decreasing solution f₄(x, −λ), λ below the cutoff, αx > β.
pub fn f4(p: &FsParams, lambda: f64, x: f64) -> Result<f64> {
    f4_with_derivative(p, lambda, x).map(|r| r.0)
}

/// W(f₄, f₁)(x)/𝔰(x) = (f₄f₁′ − f₄′f₁)/𝔰.
pub fn wronskian_over_scale(p: &FsParams, lambda: f64, x: f64) -> Result<f64> {
    let (g, dg) = f4_with_derivative(p, lambda, x)?;
    let (f, df) = f1_with_derivative(p, lambda, x)?;
    Ok((g * df - dg * f) / crate::diffusion::scale_density(p, x))
}

/// The closed form 2α^{1−α/2}β^{−β/2}B_λΔ_λ of W(f₄, f₁)/𝔰.
pub fn wronskian_closed_form(p: &FsParams, lambda: f64) -> Result<f64> {
    let cc = ContinuationCoeffs::new(p, lambda)?;
    let (a, b) = (p.alpha, p.beta);
    let pref = 2.0 * libm::exp((1.0 - a / 2.0) * libm::log(a) - b / 2.0 * libm::log(b));
    Ok(pref * (cc.b_coef * cc.delta).re)
}
