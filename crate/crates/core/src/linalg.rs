//! 2×2 symmetric matrix helpers.

use crate::error::{Error, Result};

pub type Mat2 = [[f64; 2]; 2];

pub fn mat_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut c = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    c
}

pub fn transpose(a: &Mat2) -> Mat2 {
    [[a[0][0], a[1][0]], [a[0][1], a[1][1]]]
}

/// A S Aᵀ.
pub fn sandwich(a: &Mat2, s: &Mat2) -> Mat2 {
    let mut m = mat_mul(&mat_mul(a, s), &transpose(a));
    let off = 0.5 * (m[0][1] + m[1][0]);
    m[0][1] = off;
    m[1][0] = off;
    m
}

pub fn mat_vec(a: &Mat2, v: [f64; 2]) -> [f64; 2] {
    [a[0][0] * v[0] + a[0][1] * v[1], a[1][0] * v[0] + a[1][1] * v[1]]
}

/// Eigenvalues (ascending) and unit eigenvectors (columns) of a symmetric matrix.
pub fn sym_eigen(s: &Mat2) -> ([f64; 2], Mat2) {
    let (a, b, d) = (s[0][0], 0.5 * (s[0][1] + s[1][0]), s[1][1]);
    let mid = 0.5 * (a + d);
    let rad = libm::hypot(0.5 * (a - d), b);
    let (l0, l1) = (mid - rad, mid + rad);
    if b == 0.0 {
        return if a <= d { ([a, d], [[1.0, 0.0], [0.0, 1.0]]) } else { ([d, a], [[0.0, 1.0], [1.0, 0.0]]) };
    }
    // eigenvector of l1: (b, l1 − a) or (l1 − d, b), whichever is better conditioned
    let (vx, vy) = if (l1 - a).abs() > (l1 - d).abs() { (b, l1 - a) } else { (l1 - d, b) };
    let n = libm::hypot(vx, vy);
    let (c, s1) = (vx / n, vy / n);
    ([l0, l1], [[-s1, c], [c, s1]])
}

pub fn is_positive_definite(s: &Mat2) -> bool {
    s[0][0] > 0.0 && s[0][0] * s[1][1] - s[0][1] * s[1][0] > 0.0
}

/// S^{−1/2} by spectral decomposition.
pub fn inv_sqrt(s: &Mat2) -> Result<Mat2> {
    let (l, v) = sym_eigen(s);
    if !(l[0] > 0.0) {
        return Err(Error::NotPositiveDefinite);
    }
    let w = [1.0 / libm::sqrt(l[0]), 1.0 / libm::sqrt(l[1])];
    let mut m = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            m[i][j] = v[i][0] * w[0] * v[j][0] + v[i][1] * w[1] * v[j][1];
        }
    }
    Ok(m)
}
