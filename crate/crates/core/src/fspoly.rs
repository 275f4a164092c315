//! The finite orthonormal system of Fisher-Snedecor polynomials F₀..F_N.
//!
//! F̃ₙ(x) = 2ⁿβⁿ(α/2)ₙ ₂F₁(−n, n−β/2; α/2; −αx/β) is the Rodrigues-normalized
//! polynomial; Fₙ = αₙF̃ₙ is orthonormal in L²(FS(α, β)).

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::fsdist::{pdf, FsParams};
use crate::quad::Integrator;
use crate::specfun::{hyp2f1_terminating, ln_beta, pochhammer};

/// Relative tolerance between the closed-form αₙ and the quadrature norm.
pub const NORM_TOL: f64 = 1e-6;

/// One orthonormal polynomial Fₙ with its normalizing constant and eigenvalue.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FsPolynomial {
    pub degree: usize,
    /// Monomial coefficients, ascending powers.
    pub coeffs: Vec<f64>,
    /// αₙ such that Fₙ = αₙF̃ₙ.
    pub norm_const: f64,
    /// Generator eigenvalue θn(β−2n)/(β−2).
    pub eigenvalue: f64,
}

impl FsPolynomial {
    pub fn eval(&self, x: f64) -> f64 {
        eval_poly(self, x)
    }

    pub fn derivative(&self) -> Vec<f64> {
        derive(&self.coeffs)
    }

    pub fn leading(&self) -> f64 {
        *self.coeffs.last().expect("nonempty coefficients")
    }
}

/// Coefficients of F̃ₙ, ascending.
pub fn unnormalized_coeffs(p: &FsParams, n: usize) -> Vec<f64> {
    let (a, b) = (p.alpha, p.beta);
    let nf = n as f64;
    let mut c = libm::pow(2.0 * b, nf) * pochhammer(a / 2.0, n as u32);
    let mut out = Vec::with_capacity(n + 1);
    out.push(c);
    for j in 0..n {
        let jf = j as f64;
        c *= (jf - nf) * (nf - b / 2.0 + jf) / ((a / 2.0 + jf) * (jf + 1.0)) * (-a / b);
        out.push(c);
    }
    out
}

/// F̃ₙ(x) through the terminating hypergeometric sum.
pub fn unnormalized_hyp(p: &FsParams, n: usize, x: f64) -> f64 {
    let (a, b) = (p.alpha, p.beta);
    let nf = n as f64;
    libm::pow(2.0 * b, nf)
        * pochhammer(a / 2.0, n as u32)
        * hyp2f1_terminating(-nf, nf - b / 2.0, a / 2.0, -a * x / b, n as u32)
}

/// The closed-form normalizing constant
/// αₙ = (−1)ⁿ [B(α/2, β/2) / (n!(2β)^{2n} B(α/2+n, β/2−2n) Πₖ(β/2+k−2n))]^{1/2}.
pub fn norm_const_closed_form(p: &FsParams, n: usize) -> Result<f64> {
    let (a, b) = (p.alpha, p.beta);
    let nf = n as f64;
    if !(b > 4.0 * nf) {
        return Err(Error::IndexOutOfSystem { index: n, max: p.system_size() });
    }
    let mut ln_prod = 0.0;
    for k in 1..=n {
        ln_prod += libm::log(b / 2.0 + k as f64 - 2.0 * nf);
    }
    let ln_fact: f64 = (1..=n).map(|k| libm::log(k as f64)).sum();
    let ln_sq = ln_beta(a / 2.0, b / 2.0)?
        - ln_fact
        - 2.0 * nf * libm::log(2.0 * b)
        - ln_beta(a / 2.0 + nf, b / 2.0 - 2.0 * nf)?
        - ln_prod;
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    Ok(sign * libm::exp(0.5 * ln_sq))
}

fn quad_breaks(p: &FsParams) -> [f64; 4] {
    let m = p.mean();
    [0.25 * m, m, 4.0 * m, 16.0 * m]
}

/// ∫ f(x) 𝔣𝔰(x) dx over (0, ∞) by adaptive quadrature.
pub fn expect<F: FnMut(f64) -> f64>(p: &FsParams, mut f: F) -> Result<f64> {
    Integrator::default().zero_to_inf(|x| if x > 0.0 { f(x) * pdf(p, x) } else { 0.0 }, &quad_breaks(p))
}

/// Normalization diagnostic for one degree.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct NormCheck {
    pub degree: usize,
    pub closed_form: f64,
    pub quadrature: f64,
    pub rel_diff: f64,
}

/// F₀..F_N with N the largest n such that 4n < β.
pub fn build_system(p: &FsParams) -> Result<Vec<FsPolynomial>> {
    Ok(build_system_with_checks(p)?.0)
}

/// As [`build_system`], also returning the per-degree comparison of the
/// closed-form αₙ against the quadrature norm. The quadrature value is used
/// where the two disagree beyond [`NORM_TOL`]; a failed quadrature is
/// reported as NaN.
pub fn build_system_with_checks(p: &FsParams) -> Result<(Vec<FsPolynomial>, Vec<NormCheck>)> {
    if !(p.beta > 4.0) {
        return Err(Error::TooFewPolynomials { beta: p.beta });
    }
    let n_max = p.system_size();
    let mut polys = Vec::with_capacity(n_max + 1);
    let mut checks = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        let raw = unnormalized_coeffs(p, n);
        let closed = norm_const_closed_form(p, n)?;
        // a heavy tail (4n close to β) can defeat the quadrature; keep the closed form then
        let quad = match expect(p, |x| {
            let v = horner(&raw, x);
            v * v
        }) {
            Ok(sq) => closed.signum() / libm::sqrt(sq),
            Err(_) => f64::NAN,
        };
        let rel_diff = ((closed - quad) / quad).abs();
        let used = if rel_diff > NORM_TOL && quad.is_finite() { quad } else { closed };
        checks.push(NormCheck { degree: n, closed_form: closed, quadrature: quad, rel_diff });
        let coeffs: Vec<f64> = raw.iter().map(|c| c * used).collect();
        polys.push(FsPolynomial { degree: n, coeffs, norm_const: used, eigenvalue: p.eigenvalue(n) });
    }
    Ok((polys, checks))
}

/// Compensated Horner evaluation of ascending coefficients.
pub fn horner(coeffs: &[f64], x: f64) -> f64 {
    let mut s = 0.0;
    let mut err = 0.0;
    for &c in coeffs.iter().rev() {
        let prod = s * x;
        let pe = libm::fma(s, x, -prod);
        let t = prod + c;
        let bb = t - prod;
        let se = (prod - (t - bb)) + (c - bb);
        s = t;
        err = err * x + (pe + se);
    }
    s + err
}

pub fn eval_poly(f: &FsPolynomial, x: f64) -> f64 {
    horner(&f.coeffs, x)
}

/// Coefficients of the derivative.
pub fn derive(coeffs: &[f64]) -> Vec<f64> {
    coeffs.iter().enumerate().skip(1).map(|(k, c)| k as f64 * c).collect()
}

/// Recurrence coefficients (aₙ, bₙ) of x Fₙ = aₙF_{n+1} + bₙFₙ + a_{n−1}F_{n−1}.
///
/// aₙ² = 2β²(n+1)(α+2n)(α+β−2n−2)(β−2n) / (α²(β−4n)(β−4n−2)²(β−4n−4)).
pub fn recurrence_coeffs(p: &FsParams, n: usize) -> Result<(f64, f64)> {
    let max = p.system_size();
    if n + 1 > max {
        return Err(Error::IndexOutOfSystem { index: n + 1, max });
    }
    let (a, b) = (p.alpha, p.beta);
    let nf = n as f64;
    let num = 2.0 * b * b * (nf + 1.0) * (a + 2.0 * nf) * (a + b - 2.0 * nf - 2.0) * (b - 2.0 * nf);
    let g = b - 4.0 * nf - 2.0;
    let den = a * a * (b - 4.0 * nf) * g * g * (b - 4.0 * nf - 4.0);
    let an = libm::sqrt(num / den);
    let bn = b * nf * (2.0 * nf + a - 2.0) / (a * (4.0 * nf - b - 2.0))
        - b * (nf + 1.0) * (2.0 * nf + a) / (a * (4.0 * nf - b + 2.0));
    Ok((an, bn))
}

/// The printed radicand −(n+1)(2n+α)β²(α+β−2n−2)/((2+4n−β)(4+4n−β)) of the
/// recurrence coefficient aₙ. Negative whenever 4n + 4 < β.
pub fn printed_a_radicand(p: &FsParams, n: usize) -> f64 {
    let (a, b) = (p.alpha, p.beta);
    let nf = n as f64;
    -(nf + 1.0) * (2.0 * nf + a) * b * b * (a + b - 2.0 * nf - 2.0)
        / ((2.0 + 4.0 * nf - b) * (4.0 + 4.0 * nf - b))
}

/// The printed aₙ, or `None` when its radicand is negative.
pub fn printed_a(p: &FsParams, n: usize) -> Option<f64> {
    let r = printed_a_radicand(p, n);
    if r < 0.0 {
        return None;
    }
    let (a, b) = (p.alpha, p.beta);
    let nf = n as f64;
    Some(2.0 * (b - 2.0 * nf) / (a * (4.0 * nf - b) * (2.0 + 4.0 * nf - b)) * libm::sqrt(r))
}

/// F_{n+1} from Fₙ and F_{n−1} (`None` for n = 0).
pub fn recurrence_next(p: &FsParams, f_n: &FsPolynomial, f_nm1: Option<&FsPolynomial>) -> Result<FsPolynomial> {
    let n = f_n.degree;
    let (an, bn) = recurrence_coeffs(p, n)?;
    let mut c = alloc::vec![0.0; n + 2];
    for (k, &v) in f_n.coeffs.iter().enumerate() {
        c[k + 1] += v;
        c[k] -= bn * v;
    }
    if let Some(prev) = f_nm1 {
        let (am1, _) = recurrence_coeffs(p, n - 1)?;
        for (k, &v) in prev.coeffs.iter().enumerate() {
            c[k] -= am1 * v;
        }
    }
    for v in c.iter_mut() {
        *v /= an;
    }
    Ok(FsPolynomial {
        degree: n + 1,
        norm_const: norm_const_closed_form(p, n + 1)?,
        coeffs: c,
        eigenvalue: p.eigenvalue(n + 1),
    })
}

/// Generator form 2θ/(α(β−2))·x(αx+β)Fₙ″ − θ(x − β/(β−2))Fₙ′ + λₙFₙ.
pub fn sturm_liouville_residual(p: &FsParams, f: &FsPolynomial, x: f64) -> f64 {
    let d1 = derive(&f.coeffs);
    let d2 = derive(&d1);
    let (a, b, th) = (p.alpha, p.beta, p.theta);
    2.0 * th / (a * (b - 2.0)) * x * (a * x + b) * horner(&d2, x) - th * (x - p.mean()) * horner(&d1, x)
        + f.eigenvalue * horner(&f.coeffs, x)
}

/// Self-adjoint θ-free form 2x(αx+β)y″ + α(β − (β−2)x)y′ + αn(β−2n)y.
pub fn self_adjoint_residual(p: &FsParams, f: &FsPolynomial, x: f64) -> f64 {
    let d1 = derive(&f.coeffs);
    let d2 = derive(&d1);
    let (a, b) = (p.alpha, p.beta);
    let nf = f.degree as f64;
    2.0 * x * (a * x + b) * horner(&d2, x) + a * (b - (b - 2.0) * x) * horner(&d1, x)
        + a * nf * (b - 2.0 * nf) * horner(&f.coeffs, x)
}

/// Matrix of ∫FₘFₙ𝔣𝔰 over the given system.
pub fn gram_matrix(p: &FsParams, polys: &[FsPolynomial]) -> Result<Vec<Vec<f64>>> {
    let n = polys.len();
    let mut g = alloc::vec![alloc::vec![0.0; n]; n];
    for i in 0..n {
        for j in i..n {
            let v = expect(p, |x| eval_poly(&polys[i], x) * eval_poly(&polys[j], x))?;
            g[i][j] = v;
            g[j][i] = v;
        }
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(a: f64, b: f64) -> FsParams {
        FsParams::new(a, b, 1.0).unwrap()
    }

    #[test]
    fn low_degree_expansions() {
        let q = p(5.0, 20.0);
        let (a, b) = (5.0, 20.0);
        let c1 = unnormalized_coeffs(&q, 1);
        assert!((c1[0] - a * b).abs() < 1e-12 && (c1[1] + a * (b - 2.0)).abs() < 1e-12);
        let c2 = unnormalized_coeffs(&q, 2);
        let want = [a * b * b * (a + 2.0), -2.0 * a * b * (a + 2.0) * (b - 4.0), a * a * (b - 4.0) * (b - 6.0)];
        for (g, w) in c2.iter().zip(want) {
            assert!((g - w).abs() < 1e-10 * w.abs());
        }
    }

    #[test]
    fn f0_is_one_and_f1_vanishes_at_mean() {
        let q = p(5.0, 20.0);
        let s = build_system(&q).unwrap();
        assert_eq!(s.len(), 5);
        assert_eq!(s[0].coeffs, alloc::vec![1.0]);
        assert!(eval_poly(&s[1], q.mean()).abs() < 1e-14);
        assert!(s.iter().all(|f| f.leading() > 0.0));
    }

    #[test]
    fn too_few() {
        assert!(matches!(build_system(&p(5.0, 4.0)), Err(Error::TooFewPolynomials { .. })));
    }

    #[test]
    fn printed_radicand_sign() {
        assert!(printed_a_radicand(&p(5.0, 20.0), 1) < 0.0);
        assert!(printed_a(&p(5.0, 20.0), 1).is_none());
    }

    #[test]
    fn residual_zero_for_f0() {
        let q = p(5.0, 20.0);
        let s = build_system(&q).unwrap();
        assert_eq!(sturm_liouville_residual(&q, &s[0], 2.0), 0.0);
    }
}
