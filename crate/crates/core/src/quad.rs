//! Gauss-Legendre rules, adaptive quadrature on finite and half-infinite
//! intervals, and fixed node sets on [0, ∞) for vectorized integrands.

use alloc::vec::Vec;

use crate::error::{Error, Result};

/// n-point Gauss-Legendre rule on [−1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = alloc::vec![0.0; n];
        let mut weights = alloc::vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            let mut x = libm::cos(core::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5));
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        GaussLegendre { nodes, weights }
    }

    /// Rule applied on [a, b].
    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F, a: f64, b: f64) -> f64 {
        let h = 0.5 * (b - a);
        let c = 0.5 * (b + a);
        let mut s = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            s += w * f(c + h * x);
        }
        s * h
    }

    /// Nodes and weights mapped to [a, b], appended to the given vectors.
    pub fn push_mapped(&self, a: f64, b: f64, xs: &mut Vec<f64>, ws: &mut Vec<f64>) {
        let h = 0.5 * (b - a);
        let c = 0.5 * (b + a);
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            xs.push(c + h * x);
            ws.push(w * h);
        }
    }
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Tolerances and limits for adaptive quadrature.
#[derive(Debug, Clone, Copy)]
pub struct QuadConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        QuadConfig { abs_tol: 1e-13, rel_tol: 1e-11, max_intervals: 4000 }
    }
}

/// Adaptive integrator: each interval is accepted when a 15-point rule on the
/// whole interval agrees with the sum over its two halves.
#[derive(Debug, Clone)]
pub struct Integrator {
    rule: GaussLegendre,
    pub config: QuadConfig,
}

impl Default for Integrator {
    fn default() -> Self {
        Integrator::new(QuadConfig::default())
    }
}

impl Integrator {
    pub fn new(config: QuadConfig) -> Self {
        Integrator { rule: GaussLegendre::new(15), config }
    }

    /// ∫_a^b f.
    pub fn finite<F: FnMut(f64) -> f64>(&self, mut f: F, a: f64, b: f64) -> Result<f64> {
        if a == b {
            return Ok(0.0);
        }
        let whole = self.rule.integrate(&mut f, a, b);
        let mut stack: Vec<(f64, f64, f64, usize)> = alloc::vec![(a, b, whole, 0)];
        let mut total = 0.0;
        let mut err_total = 0.0;
        let mut count = 1usize;
        let scale_est = whole.abs();
        while let Some((lo, hi, est, depth)) = stack.pop() {
            let mid = 0.5 * (lo + hi);
            let l = self.rule.integrate(&mut f, lo, mid);
            let r = self.rule.integrate(&mut f, mid, hi);
            let refined = l + r;
            let err = (refined - est).abs();
            let frac = ((hi - lo) / (b - a)).abs();
            let allowed = (self.config.abs_tol.max(self.config.rel_tol * scale_est.max(refined.abs()))) * libm::sqrt(frac);
            if err <= allowed || depth > 60 || (hi - lo).abs() < 1e-14 * (1.0 + lo.abs()) {
                total += refined;
                err_total += err;
            } else {
                count += 2;
                if count > self.config.max_intervals {
                    return Err(Error::QuadratureNotConverged { estimate: err_total + err });
                }
                stack.push((lo, mid, l, depth + 1));
                stack.push((mid, hi, r, depth + 1));
            }
        }
        Ok(total)
    }

    /// ∫_a^∞ f, split at a + scale; the tail uses x = a + scale/u.
    pub fn half_line<F: FnMut(f64) -> f64>(&self, mut f: F, a: f64, scale: f64) -> Result<f64> {
        let head = self.finite(&mut f, a, a + scale)?;
        let tail = self.finite(
            |u| {
                if u <= 0.0 {
                    0.0
                } else {
                    let x = a + scale / u;
                    let v = f(x) * scale / (u * u);
                    if v.is_finite() {
                        v
                    } else {
                        0.0
                    }
                }
            },
            0.0,
            1.0,
        )?;
        Ok(head + tail)
    }

    /// ∫_0^∞ f with breakpoints at the given interior points (ascending) and a
    /// mapped tail beyond the last one.
    pub fn zero_to_inf<F: FnMut(f64) -> f64>(&self, mut f: F, breaks: &[f64]) -> Result<f64> {
        let mut lo = 0.0;
        let mut s = 0.0;
        for &b in breaks {
            if b > lo {
                s += self.finite(&mut f, lo, b)?;
                lo = b;
            }
        }
        let scale = if lo > 0.0 { lo } else { 1.0 };
        s += self.half_line(&mut f, lo, scale)?;
        Ok(s)
    }
}

/// A fixed set of nodes and weights on [0, ∞): geometric panels between
/// `scale·2^{-lo_octaves}` and `scale·2^{hi_octaves}`, a first panel down to 0,
/// and a mapped tail.
#[derive(Debug, Clone)]
pub struct HalfLineGrid {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl HalfLineGrid {
    pub fn new(scale: f64, lo_octaves: i32, hi_octaves: i32, panels_per_octave: usize, order: usize) -> Self {
        let rule = GaussLegendre::new(order);
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        let first = scale * libm::exp2(-lo_octaves as f64);
        rule.push_mapped(0.0, first, &mut nodes, &mut weights);
        let ratio = libm::exp2(1.0 / panels_per_octave as f64);
        let mut lo = first;
        let n_panels = (lo_octaves + hi_octaves) as usize * panels_per_octave;
        for _ in 0..n_panels {
            let hi = lo * ratio;
            rule.push_mapped(lo, hi, &mut nodes, &mut weights);
            lo = hi;
        }
        // tail: x = lo / u, u ∈ (0, 1]
        let mut us = Vec::new();
        let mut uw = Vec::new();
        rule.push_mapped(0.0, 1.0, &mut us, &mut uw);
        let mut tail: Vec<(f64, f64)> = us.iter().zip(&uw).map(|(u, w)| (lo / u, w * lo / (u * u))).collect();
        tail.sort_by(|a, b| a.0.total_cmp(&b.0));
        for (x, w) in tail {
            nodes.push(x);
            weights.push(w);
        }
        HalfLineGrid { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }

    /// Σ wᵢ vᵢ for precomputed integrand values.
    pub fn dot(&self, values: &[f64]) -> f64 {
        self.weights.iter().zip(values).map(|(w, v)| w * v).sum()
    }
}
