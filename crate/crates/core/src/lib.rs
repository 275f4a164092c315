//! Fisher-Snedecor diffusion toolkit.
//!
//! The diffusion dX = −θ(X − β/(β−2))dt + √(4θ/(α(β−2)) X(αX+β)) dW has the
//! Fisher-Snedecor law FS(α, β) as invariant distribution. This crate provides
//! the distribution, its finite orthonormal polynomial system, path simulation,
//! the spectral transition density, method-of-moments estimation with an
//! explicit asymptotic covariance, and a polynomial goodness-of-fit test.
//!
//! `no_std` with `alloc`.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod diffusion;
pub mod error;
pub mod estimate;
pub mod fsdist;
pub mod fspoly;
pub mod gof;
pub mod linalg;
pub mod quad;
pub mod rng;
pub mod specfun;
pub mod spectral;

pub use error::{Error, Result};
pub use fsdist::FsParams;
