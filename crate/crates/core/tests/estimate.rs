use fsdiff_core::diffusion::{simulate_observations, Scheme, Start};
use fsdiff_core::estimate::*;
use fsdiff_core::fsdist::{mean_var, moment};
use fsdiff_core::linalg::is_positive_definite;
use fsdiff_core::rng::stream_rng;
use fsdiff_core::spectral::cross_raw_moments;
use fsdiff_core::{Error, FsParams};
use proptest::prelude::*;

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

#[test]
fn acf_edge_cases() {
    assert!(matches!(sample_acf(&[2.0; 50], 3), Err(Error::DegenerateSample(_))));
    let line: Vec<f64> = (1..=100).map(|i| i as f64).collect();
    assert!((sample_acf(&line, 1).unwrap() - 1.0).abs() < 1e-14);
    assert!(sample_acf(&line, 100).is_err());
    let te = estimate_theta(&line, 0.5, 4).unwrap();
    assert_eq!(te.theta, 0.0);
    assert!(te.warnings.contains(&EstimationWarning::AcfAtOne));
}

#[test]
fn negative_acf_is_flagged() {
    let alt: Vec<f64> = (0..200).map(|i| if i % 2 == 0 { 1.0 } else { 2.0 } + 0.001 * i as f64).collect();
    let te = estimate_theta(&alt, 1.0, 1).unwrap();
    assert!(te.rho < 0.0);
    assert!(te.warnings.contains(&EstimationWarning::AcfNonPositive));
    assert!(te.theta >= 0.0);
}

#[test]
fn moment_inversion_examples() {
    let (a, b) = alpha_beta_from_moments(1.5, 6.75).unwrap();
    assert!((a - 4.0).abs() < 1e-12 && (b - 6.0).abs() < 1e-12);
    let p = FsParams::new(5.0, 20.0, 1.0).unwrap();
    let (a, b) = alpha_beta_from_moments(moment(&p, 1).unwrap(), moment(&p, 2).unwrap()).unwrap();
    assert!((a - 5.0).abs() < 1e-9 && (b - 20.0).abs() < 1e-9);
    assert!(matches!(alpha_beta_from_moments(1.0, 3.0), Err(Error::MomentInversionFailed(_))));
    assert!(matches!(alpha_beta_from_moments(1.5, 1.0), Err(Error::MomentInversionFailed(_))));
}

#[test]
fn central_moment_variant_gives_same_alpha() {
    let (m1, m2) = (1.23, 2.4);
    let big_m2 = m2 - m1 * m1;
    let alt = 2.0 * m1 * m1 / (big_m2 * (2.0 - m1) - m1 * m1 * (m1 - 1.0));
    assert!(rel(alt, alpha_beta_from_moments(m1, m2).unwrap().0) < 1e-13);
}

// Var(X) + 2Σ Cov(X₀, X_k) etc. from the cross moments
fn series_sigma(p: &FsParams) -> [f64; 3] {
    let mu1 = moment(p, 1).unwrap();
    let mu2 = moment(p, 2).unwrap();
    let c0 = cross_raw_moments(p, 0.0).unwrap();
    let mut s = [c0.0 - mu1 * mu1, c0.1 - mu1 * mu2, c0.2 - mu2 * mu2];
    let mut k = 1.0;
    loop {
        let c = cross_raw_moments(p, k).unwrap();
        let d = [c.0 - mu1 * mu1, c.1 - mu1 * mu2, c.2 - mu2 * mu2];
        for i in 0..3 {
            s[i] += 2.0 * d[i];
        }
        if (-p.theta * k).exp() < 1e-17 {
            return s;
        }
        k += 1.0;
    }
}

#[test]
fn sigma_m_matches_lag_series() {
    for &(a, b, th) in &[(5.0, 20.0, 1.0), (3.0, 10.0, 0.7), (9.0, 40.0, 3.0)] {
        let p = FsParams::new(a, b, th).unwrap();
        let s = asymptotic_cov_m(&p).unwrap();
        let want = series_sigma(&p);
        assert!(rel(s[0][0], want[0]) < 1e-10);
        assert!(rel(s[0][1], want[1]) < 1e-10);
        assert!(rel(s[1][1], want[2]) < 1e-10);
        assert_eq!(s[0][1], s[1][0]);
        let printed = asymptotic_cov_m_as_printed(&p).unwrap();
        assert!(rel(printed[0][1], want[1]) > 0.5);
    }
}

#[test]
fn sigma11_example_and_iid_limit() {
    let p = FsParams::new(5.0, 20.0, 1.0).unwrap();
    let s = asymptotic_cov_m(&p).unwrap();
    assert!((s[0][0] - 1.5354).abs() < 1e-3);
    let fast = FsParams::new(5.0, 20.0, 60.0).unwrap();
    let (_, var) = mean_var(&fast).unwrap();
    assert!(rel(asymptotic_cov_m(&fast).unwrap()[0][0], var) < 1e-12);
    assert!(matches!(asymptotic_cov_m(&FsParams::new(5.0, 8.0, 1.0).unwrap()), Err(Error::MomentDoesNotExist { .. })));
}

#[test]
fn corrected_cov_ab_reference_values() {
    // DΣDᵀ evaluated symbolically
    let v = asymptotic_cov_ab(&FsParams::new(5.0, 20.0, 1.0).unwrap()).unwrap();
    assert!(rel(v[0][0], 718.329900054151) < 1e-9);
    assert!(rel(v[0][1], -3779.47988418292) < 1e-9);
    assert!(rel(v[1][1], 40314.4520979511) < 1e-9);
}

#[test]
fn printed_closed_forms_equal_printed_product() {
    for &a in &[3.0, 5.0, 9.0] {
        for &b in &[10.0, 20.0, 40.0] {
            for &th in &[0.2, 1.0, 3.0] {
                let p = FsParams::new(a, b, th).unwrap();
                let c = asymptotic_cov_ab_closed_form(&p).unwrap();
                let d = asymptotic_cov_ab_printed_product(&p).unwrap();
                for i in 0..2 {
                    for j in 0..2 {
                        assert!(rel(c[i][j], d[i][j]) < 1e-9, "({a},{b},{th}) [{i}{j}]");
                    }
                }
                assert!(is_positive_definite(&asymptotic_cov_ab(&p).unwrap()));
            }
        }
    }
    let c = asymptotic_cov_ab_closed_form(&FsParams::new(5.0, 20.0, 1.0).unwrap()).unwrap();
    assert!((c[1][1] - 40314.45).abs() < 0.01);
}

#[test]
fn report_without_covariance_when_beta_small() {
    let p = FsParams::new(5.0, 7.0, 1.0).unwrap();
    let mut rng = stream_rng(11, 0);
    let (v, _) = simulate_observations(&p, Start::Stationary, 5000, 0.05, 20, Scheme::ExactDrift, &mut rng).unwrap();
    let r = estimate_values(&v, 1.0, &EstimateConfig::default()).unwrap();
    if r.beta_hat <= 8.0 {
        assert!(r.cov_asymptotic.is_none() && r.ci_alpha.is_none());
        assert!(r.warnings.contains(&EstimationWarning::CovarianceUnavailable));
    }
}

#[test]
fn report_fields_are_consistent() {
    let p = FsParams::new(5.0, 20.0, 1.0).unwrap();
    let mut rng = stream_rng(12, 0);
    let (v, _) = simulate_observations(&p, Start::Stationary, 50_000, 0.02, 50, Scheme::ExactDrift, &mut rng).unwrap();
    let r = estimate_values(&v, 1.0, &EstimateConfig::default()).unwrap();
    let cov = r.cov_asymptotic.unwrap();
    assert_eq!(cov[0][1], cov[1][0]);
    let (lo, hi) = r.ci_alpha.unwrap();
    assert!(lo < r.alpha_hat && r.alpha_hat < hi);
    assert_eq!(r.n_effective, 50_000);
    let z = studentize(&r, r.alpha_hat, r.beta_hat).unwrap();
    assert_eq!(z, [0.0, 0.0]);
    assert!((r.theta_hat - 1.0).abs() < 0.1);
    let known = estimate_values(&v, 1.0, &EstimateConfig { theta_known: Some(1.0), ..Default::default() }).unwrap();
    assert!(known.warnings.contains(&EstimationWarning::ThetaKnown));
    assert_eq!(known.theta_hat, 1.0);
}

#[test]
fn acf_of_simulated_path() {
    let p = FsParams::new(5.0, 20.0, 0.5).unwrap();
    let mut rng = stream_rng(20261016, 0);
    let (v, _) = simulate_observations(&p, Start::Stationary, 200_000, 0.02, 1, Scheme::ExactDrift, &mut rng).unwrap();
    let rho = sample_acf(&v, 100).unwrap();
    // three standard deviations of the lag-2 ACF at this length (measured over replications)
    assert!((rho - (-1.0f64).exp()).abs() < 0.085, "rho = {rho}");
}

#[test]
fn cross_moments_match_long_path() {
    let p = FsParams::new(5.0, 30.0, 1.0).unwrap();
    let mut rng = stream_rng(5, 0);
    let (v, _) = simulate_observations(&p, Start::Stationary, 400_000, 0.02, 50, Scheme::ExactDrift, &mut rng).unwrap();
    for k in 1..=3usize {
        let n = (v.len() - k) as f64;
        let mut s = [0.0; 3];
        for i in 0..v.len() - k {
            let (a, b) = (v[i + k], v[i]);
            s[0] += a * b;
            s[1] += a * b * b;
            s[2] += a * a * b * b;
        }
        let want = cross_raw_moments(&p, k as f64).unwrap();
        assert!(rel(s[0] / n, want.0) < 0.01, "k={k} m11");
        assert!(rel(s[1] / n, want.1) < 0.02, "k={k} m12");
        assert!(rel(s[2] / n, want.2) < 0.04, "k={k} m22");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn moment_round_trip(a in 0.5f64..30.0, b in 4.5f64..60.0) {
        let p = FsParams::new(a, b, 1.0).unwrap();
        let (ah, bh) = alpha_beta_from_moments(moment(&p, 1).unwrap(), moment(&p, 2).unwrap()).unwrap();
        prop_assert!(rel(ah, a) < 1e-9 && rel(bh, b) < 1e-9);
    }

    #[test]
    fn cov_ab_symmetric_positive(a in 2.1f64..15.0, b in 8.5f64..60.0, th in 0.05f64..5.0) {
        let p = FsParams::new(a, b, th).unwrap();
        let v = asymptotic_cov_ab(&p).unwrap();
        prop_assert_eq!(v[0][1], v[1][0]);
        prop_assert!(is_positive_definite(&v));
    }
}
