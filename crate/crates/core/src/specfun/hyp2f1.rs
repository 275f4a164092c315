//! Gauss hypergeometric function ₂F₁(a, b; c; z) for real z < 1.
//!
//! Routing: plain series for |z| ≤ 1/2 (and 0 < z < 1), the Pfaff transform
//! for −2 ≤ z < −1/2, and the 1/z connection formula for z < −2. A terminating
//! parameter short-circuits to the finite polynomial.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::specfun::gamma::{ln_abs_gamma, rgamma};

/// Arguments of ₂F₁(a, b; c; z).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hyp2F1Args {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub z: f64,
}

impl Hyp2F1Args {
    pub fn new(a: f64, b: f64, c: f64, z: f64) -> Self {
        Hyp2F1Args { a, b, c, z }
    }
}

pub const SERIES_CAP: usize = 10_000;
pub const Z_SWITCH: f64 = 0.5;
const INTEGER_TOL: f64 = 1e-8;
const SERIES_TOL: f64 = 1e-17;

fn nonpositive_integer(x: f64) -> Option<u32> {
    let r = libm::round(x);
    if r <= 0.0 && (x - r).abs() <= 1e-12 * r.abs().max(1.0) {
        Some((-r) as u32)
    } else {
        None
    }
}

fn check_c(c: f64, terminate_at: Option<u32>) -> Result<()> {
    if let Some(m) = nonpositive_integer(c) {
        match terminate_at {
            Some(n) if n < m => Ok(()),
            _ => Err(Error::Pole(c)),
        }
    } else {
        Ok(())
    }
}

/// The finite sum Σ_{j=0}^{n} (a)_j (b)_j / ((c)_j j!) z^j.
pub fn hyp2f1_terminating(a: f64, b: f64, c: f64, z: f64, n: u32) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    for j in 0..n {
        let jf = j as f64;
        term *= (a + jf) * (b + jf) / ((c + jf) * (jf + 1.0)) * z;
        sum += term;
    }
    sum
}

/// Direct summation of the power series, |z| < 1.
pub fn hyp2f1_series(a: f64, b: f64, c: f64, z: f64) -> Result<f64> {
    if !(z.abs() < 1.0) {
        return Err(Error::Domain { what: "hyp2f1_series (|z| < 1)", value: z });
    }
    check_c(c, None)?;
    let mut term = 1.0;
    let mut sum = 1.0;
    let tail = 1.0 / (1.0 - z.abs());
    let settle = a.abs() + b.abs() + c.abs();
    for j in 0..SERIES_CAP {
        let jf = j as f64;
        term *= (a + jf) * (b + jf) / ((c + jf) * (jf + 1.0)) * z;
        sum += term;
        if term == 0.0 {
            return Ok(sum);
        }
        if jf > settle && term.abs() * tail <= SERIES_TOL * sum.abs() {
            return Ok(sum);
        }
    }
    Err(Error::NonconvergentSeries { terms: SERIES_CAP })
}

fn terminating_order(a: f64, b: f64) -> Option<u32> {
    match (nonpositive_integer(a), nonpositive_integer(b)) {
        (Some(m), Some(n)) => Some(m.min(n)),
        (Some(m), None) => Some(m),
        (None, Some(n)) => Some(n),
        (None, None) => None,
    }
}

// series or terminating sum, no transforms
fn direct(a: f64, b: f64, c: f64, z: f64) -> Result<f64> {
    if let Some(n) = terminating_order(a, b) {
        check_c(c, Some(n))?;
        return Ok(hyp2f1_terminating(a, b, c, z, n));
    }
    hyp2f1_series(a, b, c, z)
}

/// Pfaff transform route: (1−z)^{−a} ₂F₁(a, c−b; c; z/(z−1)), for z < 0.
pub fn hyp2f1_pfaff(a: f64, b: f64, c: f64, z: f64) -> Result<f64> {
    if !(z < 1.0) {
        return Err(Error::Domain { what: "hyp2f1_pfaff", value: z });
    }
    let w = z / (z - 1.0);
    // prefer the variant that terminates
    if nonpositive_integer(c - a).is_some() && nonpositive_integer(c - b).is_none() {
        return Ok(libm::pow(1.0 - z, -b) * direct(b, c - a, c, w)?);
    }
    Ok(libm::pow(1.0 - z, -a) * direct(a, c - b, c, w)?)
}

/// Connection formula to argument 1/z, for z < −1/4.
///
/// Inner functions at 1/z go through the Pfaff transform when |1/z| > 1/2, so the
/// route stays usable in the overlap region just left of −1/2.
pub fn hyp2f1_inversion(a: f64, b: f64, c: f64, z: f64) -> Result<f64> {
    if !(z < -0.25) {
        return Err(Error::Domain { what: "hyp2f1_inversion (z < -1/4)", value: z });
    }
    let d = a - b;
    if (d - libm::round(d)).abs() < INTEGER_TOL {
        return Err(Error::DegenerateContinuation { diff: d });
    }
    let u = 1.0 / z;
    let inner = |p: f64, q: f64, r: f64| -> Result<f64> {
        if u.abs() <= Z_SWITCH {
            direct(p, q, r, u)
        } else {
            hyp2f1_pfaff(p, q, r, u)
        }
    };
    let (lgc, sgc) = ln_abs_gamma(c)?;
    let mz = -z;
    // Γ(c)Γ(b−a)/(Γ(b)Γ(c−a)) (−z)^{−a} F(a, a−c+1; a−b+1; 1/z)
    let t1 = {
        let r = rgamma(b) * rgamma(c - a);
        if r == 0.0 {
            0.0
        } else {
            let (lg, s) = ln_abs_gamma(b - a)?;
            sgc * s * r * libm::exp(lgc + lg - a * libm::log(mz)) * inner(a, a - c + 1.0, a - b + 1.0)?
        }
    };
    let t2 = {
        let r = rgamma(a) * rgamma(c - b);
        if r == 0.0 {
            0.0
        } else {
            let (lg, s) = ln_abs_gamma(a - b)?;
            sgc * s * r * libm::exp(lgc + lg - b * libm::log(mz)) * inner(b, b - c + 1.0, b - a + 1.0)?
        }
    };
    Ok(t1 + t2)
}

/// ₂F₁(a, b; c; z) for real z < 1 with automatic routing.
pub fn hyp2f1(args: Hyp2F1Args) -> Result<f64> {
    let Hyp2F1Args { a, b, c, z } = args;
    if z.is_nan() || z >= 1.0 {
        return Err(Error::Domain { what: "hyp2f1 (z < 1)", value: z });
    }
    if z == 0.0 {
        check_c(c, terminating_order(a, b))?;
        return Ok(1.0);
    }
    if let Some(n) = terminating_order(a, b) {
        check_c(c, Some(n))?;
        return Ok(hyp2f1_terminating(a, b, c, z, n));
    }
    if z >= -Z_SWITCH {
        hyp2f1_series(a, b, c, z)
    } else if z >= -2.0 {
        hyp2f1_pfaff(a, b, c, z)
    } else {
        hyp2f1_inversion(a, b, c, z)
    }
}

/// Series with complex a, b and real c, z (|z| < 1).
pub fn hyp2f1_series_complex(a: Complex64, b: Complex64, c: f64, z: f64) -> Result<Complex64> {
    if !(z.abs() < 1.0) {
        return Err(Error::Domain { what: "hyp2f1_series_complex (|z| < 1)", value: z });
    }
    check_c(c, None)?;
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    let tail = 1.0 / (1.0 - z.abs());
    let settle = a.norm() + b.norm() + c.abs();
    for j in 0..SERIES_CAP {
        let jf = j as f64;
        term *= (a + jf) * (b + jf) / ((c + jf) * (jf + 1.0)) * z;
        sum += term;
        if jf > settle && term.norm() * tail <= SERIES_TOL * sum.norm().max(1e-300) {
            return Ok(sum);
        }
    }
    Err(Error::NonconvergentSeries { terms: SERIES_CAP })
}
