use fsdiff_core::fspoly::*;
use fsdiff_core::{Error, FsParams};
use proptest::prelude::*;

fn params(a: f64, b: f64) -> FsParams {
    FsParams::new(a, b, 1.0).unwrap()
}

#[test]
fn gram_is_identity() {
    for &(a, b) in &[(5.0, 20.0), (3.0, 12.0), (7.0, 30.0)] {
        let p = params(a, b);
        let s = build_system(&p).unwrap();
        let g = gram_matrix(&p, &s).unwrap();
        for (i, row) in g.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((v - want).abs() < 1e-7, "({a},{b}) [{i},{j}] = {v}");
            }
        }
    }
}

#[test]
fn closed_form_norm_agrees_with_quadrature() {
    for &(a, b) in &[(5.0, 20.0), (3.0, 12.0), (7.0, 30.0), (2.5, 9.0)] {
        let (_, checks) = build_system_with_checks(&params(a, b)).unwrap();
        for c in checks {
            assert!(c.rel_diff < NORM_TOL, "({a},{b}) n={} diff {}", c.degree, c.rel_diff);
        }
    }
}

#[test]
fn orthogonal_pair_2_3() {
    let p = params(5.0, 21.0);
    let s = build_system(&p).unwrap();
    assert_eq!(s.len(), 6);
    let v = expect(&p, |x| eval_poly(&s[2], x) * eval_poly(&s[3], x)).unwrap();
    assert!(v.abs() < 1e-8);
}

#[test]
fn centered() {
    let p = params(5.0, 20.0);
    for f in build_system(&p).unwrap().iter().skip(1) {
        assert!(expect(&p, |x| eval_poly(f, x)).unwrap().abs() < 1e-7);
    }
}

#[test]
fn eval_matches_hypergeometric_route() {
    let p = params(5.0, 20.0);
    let s = build_system(&p).unwrap();
    for f in &s {
        for k in 0..10 {
            let x = 0.05 + 0.77 * k as f64;
            let direct = f.norm_const * unnormalized_hyp(&p, f.degree, x);
            let h = eval_poly(f, x);
            assert!((h - direct).abs() <= 1e-10 * direct.abs().max(1e-3), "n={} x={x}", f.degree);
        }
    }
}

#[test]
fn recurrence_reproduces_system() {
    for &(a, b) in &[(5.0, 20.0), (7.0, 30.0), (3.0, 13.0)] {
        let p = params(a, b);
        let s = build_system(&p).unwrap();
        for n in 0..s.len() - 1 {
            let prev = if n == 0 { None } else { Some(&s[n - 1]) };
            let next = recurrence_next(&p, &s[n], prev).unwrap();
            for (g, w) in next.coeffs.iter().zip(&s[n + 1].coeffs) {
                assert!((g - w).abs() <= 1e-9 * w.abs(), "({a},{b}) n={n}");
            }
        }
        let last = s.last().unwrap();
        assert!(matches!(
            recurrence_next(&p, last, Some(&s[s.len() - 2])),
            Err(Error::IndexOutOfSystem { .. })
        ));
    }
}

#[test]
fn residual_examples() {
    let p = params(5.0, 20.0);
    let s = build_system(&p).unwrap();
    assert!(sturm_liouville_residual(&p, &s[2], 1.0).abs() < 1e-8);
    assert!(sturm_liouville_residual(&p, &s[1], 3.0).abs() < 1e-8);
}

#[test]
fn self_adjoint_form_is_rescaled_generator() {
    let p = FsParams::new(5.0, 20.0, 0.7).unwrap();
    let s = build_system(&p).unwrap();
    for f in &s {
        for &x in &[0.3, 1.0, 4.0] {
            let scale = 1.0 + eval_poly(f, x).abs() * p.alpha * p.beta * p.beta;
            assert!(self_adjoint_residual(&p, f, x).abs() < 1e-8 * scale);
        }
    }
}

#[test]
fn eigenvalues_increase_below_cutoff() {
    for &b in &[9.0, 12.0, 20.0, 30.0, 41.0] {
        let p = FsParams::new(5.0, b, 0.8).unwrap();
        let s = build_system(&p).unwrap();
        for w in s.windows(2) {
            assert!(w[1].eigenvalue > w[0].eigenvalue);
        }
        assert!(s.last().unwrap().eigenvalue <= p.cutoff());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn residual_small_everywhere(a in 2.1f64..12.0, b in 4.5f64..40.0, th in 0.1f64..3.0, x in 0.01f64..30.0) {
        let p = FsParams::new(a, b, th).unwrap();
        let s = build_system(&p).unwrap();
        for f in &s {
            let r = sturm_liouville_residual(&p, f, x);
            prop_assert!(r.abs() <= 1e-8 * (1.0 + eval_poly(f, x).abs()) * (1.0 + x).powi(f.degree as i32));
        }
    }

    #[test]
    fn degree_and_leading(a in 0.5f64..12.0, b in 4.5f64..40.0) {
        let p = params(a, b);
        for f in build_system(&p).unwrap() {
            prop_assert_eq!(f.coeffs.len(), f.degree + 1);
            prop_assert!(f.leading() > 0.0);
        }
    }
}
