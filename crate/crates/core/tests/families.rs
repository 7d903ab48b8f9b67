mod common;

use std::f64::consts::PI;

use num_complex::Complex64;
use opx_core::{eval_sequence, recurrence_coefficients, FamilySpec, OpxError, Support};
use proptest::prelude::*;

fn families() -> Vec<FamilySpec> {
    vec![
        FamilySpec::chebyshev1(),
        FamilySpec::laguerre(0.0).unwrap(),
        FamilySpec::laguerre(0.5).unwrap(),
        FamilySpec::jacobi(0.3, 0.7).unwrap(),
        FamilySpec::jacobi(-0.5, 0.5).unwrap(),
    ]
}

#[test]
fn chebyshev_table() {
    let r = recurrence_coefficients(&FamilySpec::chebyshev1(), 3).unwrap();
    assert_eq!(r, vec![(0.0, PI), (0.0, 0.5), (0.0, 0.25)]);
    let mass = common::family_gauss(&FamilySpec::chebyshev1(), 1).1[0];
    assert!((mass - PI).abs() < 1e-14);
}

#[test]
fn laguerre_table() {
    let r = recurrence_coefficients(&FamilySpec::laguerre(1.0).unwrap(), 2).unwrap();
    assert_eq!(r[1].1, 2.0);
    let r = recurrence_coefficients(&FamilySpec::laguerre(0.0).unwrap(), 2).unwrap();
    assert_eq!((r[0].0, r[1].0), (1.0, 3.0));
}

#[test]
fn parameter_ranges() {
    assert!(matches!(FamilySpec::laguerre(-1.0), Err(OpxError::ParameterOutOfRange(_))));
    assert!(matches!(FamilySpec::jacobi(-1.0, 0.0), Err(OpxError::ParameterOutOfRange(_))));
    assert!(matches!(FamilySpec::jacobi(0.0, -1.2), Err(OpxError::ParameterOutOfRange(_))));
    for fam in families() {
        let r = recurrence_coefficients(&fam, 30).unwrap();
        assert_eq!(r.len(), 30);
        assert!(r.iter().all(|&(_, l)| l > 0.0), "{}", fam.name());
    }
}

#[test]
fn sequence_examples() {
    let s = eval_sequence(&FamilySpec::chebyshev1(), 2, 0.5, false);
    assert_eq!(s.values, vec![1.0, 0.5, -0.25]);
    assert!(s.derivs.is_none());
    let s = eval_sequence(&FamilySpec::chebyshev1(), 3, 1.0, true);
    assert_eq!(s.derivs.unwrap()[2], 2.0);
    for fam in families() {
        assert_eq!(eval_sequence(&fam, 0, 0.37, false).values, vec![1.0]);
        let c1 = fam.coeff(1).0;
        assert_eq!(eval_sequence(&fam, 1, 0.37, false).values[1], 0.37 - c1);
    }
}

#[test]
fn custom_table_matches_builtin() {
    let rows = recurrence_coefficients(&FamilySpec::chebyshev1(), 12).unwrap();
    let custom = FamilySpec::from_table(rows, Support::Interval(-1.0, 1.0)).unwrap();
    for x in [-0.9, 0.1, 0.75] {
        assert_eq!(
            eval_sequence(&custom, 10, x, false).values,
            eval_sequence(&FamilySpec::chebyshev1(), 10, x, false).values
        );
    }
}

#[test]
fn monic_by_interpolation() {
    for fam in families() {
        for n in 1..=15 {
            // Chebyshev-spaced points keep the divided differences well conditioned.
            let xs: Vec<f64> = (0..=n)
                .map(|i| 2.0 * ((2 * i + 1) as f64 * PI / (2 * (n + 1)) as f64).cos())
                .map(|t| match fam.support() {
                    Support::HalfLine(_) => 2.0 * n as f64 * (1.0 + t / 2.0),
                    _ => t / 2.0,
                })
                .collect();
            let ys: Vec<f64> = xs.iter().map(|&x| eval_sequence(&fam, n, x, false).values[n]).collect();
            let lead = common::leading_coefficient(&xs, &ys);
            assert!((lead - 1.0).abs() < 1e-6, "{} n={n} lead={lead}", fam.name());
        }
    }
}

#[test]
fn orthogonal_under_dense_quadrature() {
    // The Laguerre and Jacobi c_n are not taken on trust: the Gram matrix of the
    // evaluated sequence is checked against the dense eigen-solve rule.
    for fam in families() {
        let (nodes, weights) = common::family_gauss(&fam, 14);
        let vals: Vec<Vec<f64>> = nodes.iter().map(|&x| eval_sequence(&fam, 10, x, false).values).collect();
        for n in 0..=10 {
            for m in 0..n {
                let g = |a: usize, b: usize| -> f64 {
                    vals.iter().zip(&weights).map(|(v, w)| w * v[a] * v[b]).sum()
                };
                let r = g(n, m) / (g(n, n) * g(m, m)).sqrt();
                assert!(r.abs() < 1e-11, "{} ({n},{m}) {r:e}", fam.name());
            }
        }
    }
}

#[test]
fn laguerre_explicit_form() {
    for gamma in [0.0, 0.5, 2.3] {
        let fam = FamilySpec::laguerre(gamma).unwrap();
        for x in [0.1, 1.7, 6.0, 13.0] {
            let v = eval_sequence(&fam, 12, x, false).values;
            for (n, &p) in v.iter().enumerate() {
                let (e, scale) = common::laguerre_monic_scaled(n, gamma, x);
                assert!((p - e).abs() <= 1e-13 * scale, "gamma={gamma} n={n} x={x}");
            }
        }
    }
}

#[test]
fn complex_point_matches_real_parts() {
    let fam = FamilySpec::jacobi(0.3, 0.7).unwrap();
    let z = Complex64::new(0.4, 0.0);
    let zc = eval_sequence(&fam, 9, z, true);
    let zr = eval_sequence(&fam, 9, 0.4, true);
    for j in 0..=9 {
        assert_eq!(zc.values[j].re, zr.values[j]);
        assert_eq!(zc.values[j].im, 0.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ttrr_residual(fi in 0usize..5, t in 0.0f64..1.0, n in 1usize..30) {
        let fam = &families()[fi];
        let x = match fam.support() {
            Support::HalfLine(a) => a + 40.0 * t,
            Support::Interval(a, b) => a + (b - a) * t,
            Support::RealLine => 6.0 * t - 3.0,
        };
        let v = eval_sequence(fam, n + 1, x, false).values;
        let (c, l) = fam.coeff(n + 1);
        let res = (x * v[n] - v[n + 1] - c * v[n] - l * v[n - 1]).abs();
        let scale = [1.0, v[n + 1].abs(), (x * v[n]).abs(), (c * v[n]).abs(), (l * v[n - 1]).abs()]
            .into_iter()
            .fold(0.0, f64::max);
        prop_assert!(res <= 1e-12 * scale, "res {res:e} scale {scale:e}");
    }

    #[test]
    fn chebyshev_trig_identity(theta in 0.0f64..PI, n in 1usize..40) {
        let v = eval_sequence(&FamilySpec::chebyshev1(), n, theta.cos(), false).values;
        let expected = 2f64.powi(1 - n as i32) * (n as f64 * theta).cos();
        prop_assert!((v[n] - expected).abs() <= 1e-13 * 2f64.powi(1 - n as i32) * n as f64);
        prop_assert!((v[n] - common::chebyshev_monic(n, theta.cos())).abs() <= 1e-12);
    }

    #[test]
    fn derivative_matches_central_difference(fi in 0usize..5, t in 0.05f64..0.95, n in 1usize..12) {
        let fam = &families()[fi];
        let x = match fam.support() {
            Support::HalfLine(a) => a + 10.0 * t,
            Support::Interval(a, b) => a + (b - a) * t,
            Support::RealLine => 6.0 * t - 3.0,
        };
        let h = 1e-6;
        let d = eval_sequence(fam, n, x, true).derivs.unwrap();
        let up = eval_sequence(fam, n, x + h, false).values;
        let down = eval_sequence(fam, n, x - h, false).values;
        for j in 1..=n {
            let fd = (up[j] - down[j]) / (2.0 * h);
            // Skip points where P_j is nearly stationary: the relative test is ill conditioned there.
            if d[j].abs() < 1e-3 * up[j].abs().max(1.0) {
                continue;
            }
            prop_assert!((fd - d[j]).abs() <= 1e-6 * d[j].abs(), "j={j} fd={fd} d={}", d[j]);
        }
    }
}
