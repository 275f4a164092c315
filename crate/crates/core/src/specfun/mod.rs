//! Special functions: gamma family, incomplete gamma/beta, normal helpers, ₂F₁.

pub mod gamma;
pub mod hyp2f1;
pub mod incomplete;

pub use gamma::{
    abs_gamma_complex, beta, digamma, gamma, gamma_complex, ln_abs_gamma, ln_abs_gamma_complex, ln_beta,
    ln_gamma, ln_gamma_complex, pochhammer, rgamma, sin_pi, EULER_GAMMA,
};
pub use hyp2f1::{
    hyp2f1, hyp2f1_inversion, hyp2f1_pfaff, hyp2f1_series, hyp2f1_series_complex, hyp2f1_terminating, Hyp2F1Args,
};
pub use incomplete::{
    chi_square_sf, norm_cdf, norm_quantile, reg_inc_beta, reg_inc_gamma_lower, reg_inc_gamma_upper,
};
