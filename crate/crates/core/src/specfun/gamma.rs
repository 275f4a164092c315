//! Gamma-family functions: ln Γ, |Γ(x+iy)|, complex ln Γ, Beta, digamma.
//!
//! Real ln Γ uses Taylor series around 1 and 2 (coefficients ζ(k) − 1 built at
//! compile time), the recurrence, and Stirling's series for x ≥ 10. This keeps
//! the relative error near the two real roots at machine level.

use core::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;
const LN_PI: f64 = 1.144_729_885_849_400_2;

const ZETA_TERMS: usize = 40;

const fn inv_pow(n: f64, k: u32) -> f64 {
    let mut r = 1.0;
    let mut i = 0;
    while i < k {
        r /= n;
        i += 1;
    }
    r
}

// ζ(k) − 1 by direct summation plus an Euler-Maclaurin tail at N = 40.
const fn zeta_minus_one(k: u32) -> f64 {
    let mut s = 0.0;
    let mut n = 2;
    while n < 40 {
        s += inv_pow(n as f64, k);
        n += 1;
    }
    let nn = 40.0;
    let kf = k as f64;
    let fk = inv_pow(nn, k);
    s += fk * nn / (kf - 1.0);
    s += fk / 2.0;
    s += kf * fk / nn / 12.0;
    let t3 = kf * (kf + 1.0) * (kf + 2.0) * fk / (nn * nn * nn);
    s -= t3 / 720.0;
    let t5 = t3 * (kf + 3.0) * (kf + 4.0) / (nn * nn);
    s += t5 / 30240.0;
    let t7 = t5 * (kf + 5.0) * (kf + 6.0) / (nn * nn);
    s -= t7 / 1_209_600.0;
    s
}

const fn zeta_table() -> [f64; ZETA_TERMS] {
    let mut t = [0.0; ZETA_TERMS];
    let mut k = 2;
    while k < ZETA_TERMS {
        t[k] = zeta_minus_one(k as u32);
        k += 1;
    }
    t
}

static ZETA_M1: [f64; ZETA_TERMS] = zeta_table();

// Σ_{k≥2} (−1)^k (ζ(k) − 1) ε^k / k, |ε| ≤ 1/2.
fn zeta_tail_series(eps: f64) -> f64 {
    let mut sum = 0.0;
    let mut p = eps * eps;
    for (k, z) in ZETA_M1.iter().enumerate().skip(2) {
        let term = z * p / k as f64;
        if k % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
        if term.abs() < 1e-18 * sum.abs().max(1e-300) {
            break;
        }
        p *= eps;
    }
    sum
}

// Bernoulli coefficients B_{2k} / (2k (2k − 1)), k = 1..8.
const STIRLING: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
];

fn stirling(x: f64) -> f64 {
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let mut corr = 0.0;
    let mut p = inv;
    for c in STIRLING {
        corr += c * p;
        p *= inv2;
    }
    (x - 0.5) * libm::log(x) - x + LN_SQRT_2PI + corr
}

fn ln_gamma_pos(x: f64) -> f64 {
    if x < 0.5 {
        ln_gamma_pos(x + 1.0) - libm::log(x)
    } else if x < 1.5 {
        let e = x - 1.0;
        -EULER_GAMMA * e + (e - libm::log1p(e)) + zeta_tail_series(e)
    } else if x < 2.5 {
        let e = x - 2.0;
        (1.0 - EULER_GAMMA) * e + zeta_tail_series(e)
    } else if x < 10.0 {
        let mut y = x;
        let mut prod = 1.0;
        while y >= 2.5 {
            y -= 1.0;
            prod *= y;
        }
        ln_gamma_pos(y) + libm::log(prod)
    } else {
        stirling(x)
    }
}

/// ln Γ(x) for x > 0.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if x.is_nan() || x <= 0.0 {
        return Err(Error::Domain { what: "ln_gamma", value: x });
    }
    if x.is_infinite() {
        return Ok(f64::INFINITY);
    }
    Ok(ln_gamma_pos(x))
}

/// sin(πx) with exact zeros at the integers.
pub fn sin_pi(x: f64) -> f64 {
    let r = x - 2.0 * libm::round(x / 2.0);
    if r == 0.0 || r.abs() == 1.0 {
        return 0.0;
    }
    if r > 0.5 {
        libm::sin(PI * (1.0 - r))
    } else if r < -0.5 {
        -libm::sin(PI * (1.0 + r))
    } else {
        libm::sin(PI * r)
    }
}

fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x == libm::round(x)
}

/// ln |Γ(x)| and the sign of Γ(x) for real x off the poles.
pub fn ln_abs_gamma(x: f64) -> Result<(f64, f64)> {
    if x.is_nan() {
        return Err(Error::Domain { what: "ln_abs_gamma", value: x });
    }
    if is_nonpositive_integer(x) {
        return Err(Error::Pole(x));
    }
    if x > 0.0 {
        return Ok((ln_gamma_pos(x), 1.0));
    }
    // reflection: Γ(x)Γ(1−x) = π / sin(πx)
    let s = sin_pi(x);
    let lg = LN_PI - libm::log(s.abs()) - ln_gamma_pos(1.0 - x);
    Ok((lg, s.signum()))
}

/// Γ(x) for real x off the poles.
pub fn gamma(x: f64) -> Result<f64> {
    let (lg, s) = ln_abs_gamma(x)?;
    Ok(s * libm::exp(lg))
}

/// 1/Γ(x), zero at the poles.
pub fn rgamma(x: f64) -> f64 {
    if is_nonpositive_integer(x) {
        return 0.0;
    }
    match ln_abs_gamma(x) {
        Ok((lg, s)) => s * libm::exp(-lg),
        Err(_) => f64::NAN,
    }
}

/// Rising factorial (a)_n.
pub fn pochhammer(a: f64, n: u32) -> f64 {
    let mut p = 1.0;
    for j in 0..n {
        p *= a + j as f64;
    }
    p
}

fn stirling_complex(z: Complex64) -> Complex64 {
    let inv = z.inv();
    let inv2 = inv * inv;
    let mut corr = Complex64::new(0.0, 0.0);
    let mut p = inv;
    for c in STIRLING {
        corr += p * c;
        p *= inv2;
    }
    (z - 0.5) * z.ln() - z + LN_SQRT_2PI + corr
}

// ln sin(πz) for Im z ≥ 0, stable for large Im z.
fn ln_sin_pi(z: Complex64) -> Complex64 {
    if z.im > 5.0 {
        // sin(πz) = (i/2) e^{−iπz} (1 − e^{2πiz})
        let i = Complex64::new(0.0, 1.0);
        let e2 = (i * 2.0 * PI * z).exp();
        Complex64::new(-core::f64::consts::LN_2, PI / 2.0) - i * PI * z + (-e2).ln_1p_safe()
    } else {
        let s = Complex64::new(
            sin_pi(z.re) * libm::cosh(PI * z.im),
            cos_pi(z.re) * libm::sinh(PI * z.im),
        );
        s.ln()
    }
}

trait Ln1p {
    fn ln_1p_safe(self) -> Complex64;
}

impl Ln1p for Complex64 {
    fn ln_1p_safe(self) -> Complex64 {
        if self.norm() < 1e-8 {
            self - self * self / 2.0
        } else {
            (self + 1.0).ln()
        }
    }
}

fn cos_pi(x: f64) -> f64 {
    sin_pi(x + 0.5)
}

/// Principal-branch-free ln Γ(z) for complex z; only exp of the result is
/// branch independent. Errors at the poles.
pub fn ln_gamma_complex(z: Complex64) -> Result<Complex64> {
    if z.im == 0.0 && is_nonpositive_integer(z.re) {
        return Err(Error::Pole(z.re));
    }
    if z.im < 0.0 {
        return ln_gamma_complex(z.conj()).map(|w| w.conj());
    }
    if z.re < 0.5 {
        let w = ln_gamma_complex(Complex64::new(1.0, 0.0) - z)?;
        return Ok(Complex64::new(LN_PI, 0.0) - ln_sin_pi(z) - w);
    }
    let mut shift = Complex64::new(0.0, 0.0);
    let mut w = z;
    while w.norm() < 10.0 {
        shift += w.ln();
        w += 1.0;
    }
    Ok(stirling_complex(w) - shift)
}

/// Γ(z) for complex z.
pub fn gamma_complex(z: Complex64) -> Result<Complex64> {
    ln_gamma_complex(z).map(|w| w.exp())
}

/// ln |Γ(x + iy)|.
pub fn ln_abs_gamma_complex(x: f64, y: f64) -> Result<f64> {
    if y == 0.0 {
        return ln_abs_gamma(x).map(|(lg, _)| lg);
    }
    let y = y.abs();
    if x < 0.5 {
        // |Γ(z)| = π / (|sin πz| |Γ(1 − z)|), |sin πz|² = sin²πx + sinh²πy
        let sx = sin_pi(x);
        let shy = libm::sinh(PI * y);
        let ln_abs_sin = if PI * y > 20.0 {
            PI * y - core::f64::consts::LN_2 + 0.5 * libm::log1p((sx / shy) * (sx / shy))
        } else {
            0.5 * libm::log(sx * sx + shy * shy)
        };
        return Ok(LN_PI - ln_abs_sin - ln_abs_gamma_complex(1.0 - x, y)?);
    }
    let mut lnshift = 0.0;
    let mut w = Complex64::new(x, y);
    while w.norm() < 10.0 {
        lnshift += 0.5 * libm::log(w.norm_sqr());
        w += 1.0;
    }
    Ok(stirling_complex(w).re - lnshift)
}

/// |Γ(x + iy)|.
pub fn abs_gamma_complex(x: f64, y: f64) -> Result<f64> {
    ln_abs_gamma_complex(x, y).map(libm::exp)
}

/// ln B(a, b).
pub fn ln_beta(a: f64, b: f64) -> Result<f64> {
    if !(a > 0.0) || !(b > 0.0) {
        return Err(Error::Domain { what: "beta", value: if a > 0.0 { b } else { a } });
    }
    Ok(ln_gamma_pos(a) + ln_gamma_pos(b) - ln_gamma_pos(a + b))
}

/// B(a, b) = Γ(a)Γ(b)/Γ(a+b).
pub fn beta(a: f64, b: f64) -> Result<f64> {
    ln_beta(a, b).map(libm::exp)
}

/// ψ(x) = Γ'(x)/Γ(x) for x > 0.
pub fn digamma(x: f64) -> Result<f64> {
    if x.is_nan() || x <= 0.0 {
        return Err(Error::Domain { what: "digamma", value: x });
    }
    let mut x = x;
    let mut acc = 0.0;
    while x < 10.0 {
        acc -= 1.0 / x;
        x += 1.0;
    }
    let inv2 = 1.0 / (x * x);
    let series = inv2
        * (1.0 / 12.0
            - inv2
                * (1.0 / 120.0
                    - inv2
                        * (1.0 / 252.0
                            - inv2
                                * (1.0 / 240.0
                                    - inv2 * (1.0 / 132.0 - inv2 * (691.0 / 32760.0 - inv2 / 12.0))))));
    Ok(acc + libm::log(x) - 0.5 / x - series)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn zeta_table_values() {
        assert!((ZETA_M1[2] - (PI * PI / 6.0 - 1.0)).abs() < 1e-15);
        assert!((ZETA_M1[4] - (PI.powi(4) / 90.0 - 1.0)).abs() < 1e-15);
        assert!((ZETA_M1[3] - 0.202_056_903_159_594_3).abs() < 1e-16);
    }

    #[test]
    fn ln_gamma_examples() {
        assert_eq!(ln_gamma(1.0).unwrap(), 0.0);
        assert_eq!(ln_gamma(2.0).unwrap(), 0.0);
        assert!(rel(ln_gamma(0.5).unwrap(), 0.5 * PI.ln()) < 1e-15);
        assert!(rel(ln_gamma(10.0).unwrap(), 362_880f64.ln()) < 1e-15);
        assert!(ln_gamma(0.0).is_err());
        assert!(ln_gamma(-1.5).is_err());
    }

    #[test]
    fn ln_gamma_factorials() {
        let mut f = 1.0f64;
        for n in 1..60u32 {
            let want = f.ln();
            let got = ln_gamma(n as f64).unwrap();
            if n > 2 {
                assert!(rel(got, want) < 1e-14, "n={n} got={got} want={want}");
            }
            f *= n as f64;
        }
    }

    #[test]
    fn sin_pi_integers() {
        for k in -6..6 {
            assert_eq!(sin_pi(k as f64), 0.0);
        }
        assert!((sin_pi(0.5) - 1.0).abs() < 1e-16);
        assert!((sin_pi(-2.5) + 1.0).abs() < 1e-16);
    }

    #[test]
    fn complex_matches_real() {
        for &x in &[0.3, 1.7, 4.2, 12.5, -2.5, -0.7] {
            let r = ln_gamma_complex(Complex64::new(x, 0.0)).unwrap();
            let (lg, s) = ln_abs_gamma(x).unwrap();
            assert!((r.re - lg).abs() < 1e-13 * lg.abs().max(1.0), "x={x}");
            let g = r.exp();
            assert!((g.re.signum() - s).abs() < 1e-12);
        }
    }

    #[test]
    fn abs_gamma_complex_identity() {
        // |Γ(iy)|² = π / (y sinh πy)
        for &y in &[0.1, 1.0, 3.0, 20.0] {
            let want = (PI / (y * (PI * y).sinh())).sqrt();
            assert!(rel(abs_gamma_complex(0.0, y).unwrap(), want) < 1e-13, "y={y}");
        }
        // |Γ(1/2 + iy)|² = π / cosh πy
        for &y in &[0.5, 2.0, 30.0] {
            let want = (PI / (PI * y).cosh()).sqrt();
            assert!(rel(abs_gamma_complex(0.5, y).unwrap(), want) < 1e-13, "y={y}");
        }
    }

    #[test]
    fn complex_gamma_recurrence() {
        for &(x, y) in &[(-4.75, 0.3), (0.2, 2.0), (3.3, -1.2), (-5.0, 1e-3)] {
            let z = Complex64::new(x, y);
            let g = gamma_complex(z).unwrap();
            let g1 = gamma_complex(z + 1.0).unwrap();
            assert!(((g * z - g1) / g1).norm() < 1e-13, "z={z}");
            let m = abs_gamma_complex(x, y).unwrap();
            assert!(rel(m, g.norm()) < 1e-13);
        }
    }

    #[test]
    fn digamma_values() {
        assert!(rel(digamma(1.0).unwrap(), -EULER_GAMMA) < 1e-14);
        assert!(rel(digamma(2.0).unwrap(), 1.0 - EULER_GAMMA) < 1e-14);
        assert!(rel(digamma(0.5).unwrap(), -EULER_GAMMA - 2.0 * core::f64::consts::LN_2) < 1e-14);
        assert!(digamma(0.0).is_err());
    }
}
