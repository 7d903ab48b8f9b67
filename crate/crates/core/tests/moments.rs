mod common;

use std::f64::consts::{PI, SQRT_2};

use opx_core::moments::{
    apply_functional, apply_with_rule, gauss_rule_from, max_off_diagonal, monomial_moments, orthogonality_residual,
};
use opx_core::transforms::UvarovData;
use opx_core::{eval_sequence, gauss_rule, FamilySpec, FunctionalKind, KernelContext, OpxError, Recurrence};
use proptest::prelude::*;
use statrs::function::gamma::gamma;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

#[test]
fn small_rules() {
    let r = gauss_rule(&FamilySpec::chebyshev1(), 1).unwrap();
    assert_eq!((r.nodes[0], r.weights[0]), (0.0, PI));
    let r = gauss_rule(&FamilySpec::chebyshev1(), 2).unwrap();
    for (x, w) in r.nodes.iter().zip(&r.weights) {
        assert!((x.abs() - SQRT_2 / 2.0).abs() < 1e-15);
        assert!((w - PI / 2.0).abs() < 1e-14);
    }
    assert!((r.nodes[0] - (3.0 * PI / 4.0).cos()).abs() < 1e-15);
    let r = gauss_rule(&FamilySpec::laguerre(0.0).unwrap(), 2).unwrap();
    assert!((r.nodes[0] - (2.0 - SQRT_2)).abs() < 1e-14);
    assert!((r.nodes[1] - (2.0 + SQRT_2)).abs() < 1e-14);
}

#[test]
fn rule_invariants_against_dense_eigensolve() {
    let fams = [
        FamilySpec::chebyshev1(),
        FamilySpec::laguerre(0.5).unwrap(),
        FamilySpec::jacobi(0.3, 0.7).unwrap(),
        FamilySpec::jacobi(-0.5, 0.5).unwrap(),
    ];
    for fam in &fams {
        for m in [1, 3, 8, 20] {
            let r = gauss_rule(fam, m).unwrap();
            let (xs, ws) = common::family_gauss(fam, m);
            assert!(rel(r.mass(), fam.mu0()) < 1e-12);
            assert!(r.nodes.windows(2).all(|w| w[0] < w[1]));
            assert!(r.weights.iter().all(|&w| w > 0.0));
            for i in 0..m {
                assert!((r.nodes[i] - xs[i]).abs() < 1e-12 * (1.0 + xs[i].abs()), "{} m={m}", fam.name());
                assert!((r.weights[i] - ws[i]).abs() < 1e-12 * fam.mu0(), "{} m={m} i={i}", fam.name());
            }
        }
    }
}

#[test]
fn exactness_chebyshev_closed_moments() {
    // int x^{2j} (1-x^2)^{-1/2} dx = pi (2j)! / (4^j j!^2)
    let fam = FamilySpec::chebyshev1();
    for m in 1..=16 {
        let r = gauss_rule(&fam, m).unwrap();
        for j in 0..2 * m {
            let got = r.integrate(|x| x.powi(j as i32));
            let expected = if j % 2 == 1 {
                0.0
            } else {
                let h = j / 2;
                PI * common::pochhammer(0.5, h) / common::pochhammer(1.0, h)
            };
            assert!((got - expected).abs() <= 1e-10 * expected.abs().max(1.0), "m={m} j={j}");
        }
    }
}

#[test]
fn exactness_laguerre_gamma_moments() {
    for g in [0.0, 0.5, 1.7] {
        let fam = FamilySpec::laguerre(g).unwrap();
        for m in [1, 4, 10] {
            let r = gauss_rule(&fam, m).unwrap();
            for j in 0..2 * m {
                let got = r.integrate(|x| x.powi(j as i32));
                let expected = gamma(g + 1.0 + j as f64);
                assert!(rel(got, expected) < 1e-10, "g={g} m={m} j={j}");
            }
        }
    }
}

#[test]
fn library_moments_match_closed_forms() {
    let rec = FamilySpec::laguerre(0.5).unwrap().recurrence::<f64>(12);
    for (j, &mom) in monomial_moments(&rec, 14).iter().enumerate() {
        assert!(rel(mom, gamma(1.5 + j as f64)) < 1e-12);
    }
}

#[test]
fn functional_examples() {
    let cheb = FamilySpec::chebyshev1();
    let mu0 = apply_functional(&cheb, FunctionalKind::Base, |_| 1.0, 0).unwrap();
    assert!((mu0 - PI).abs() < 1e-14);
    let c = |n: usize, x: f64| eval_sequence(&cheb, n, x, false).values[n];
    let off = apply_functional(&cheb, FunctionalKind::Base, |x| c(1, x) * c(2, x), 3).unwrap();
    assert!(off.abs() < 1e-15);
    let sq = apply_functional(&cheb, FunctionalKind::Base, |x| c(1, x).powi(2), 2).unwrap();
    assert!((sq - PI / 2.0).abs() < 1e-14);
}

#[test]
fn shift_and_mass_validation() {
    let cheb = FamilySpec::chebyshev1();
    let e = apply_functional(&cheb, FunctionalKind::Geronimus { k: 0.5, mass0: 1.0 }, |x| x, 1);
    assert_eq!(e, Err(OpxError::ShiftInsideSupport { shift: 0.5 }));
    let e = apply_functional(&cheb, FunctionalKind::Uvarov { k: 2.0, r0: 0.0 }, |x| x, 1);
    assert!(matches!(e, Err(OpxError::ParameterOutOfRange(_))));
    let bad = Recurrence::new(vec![0.0; 3], vec![1.0, 0.5, -0.1]).unwrap();
    assert!(matches!(gauss_rule_from(&bad, 3), Err(OpxError::NotPositiveDefinite { index: 3, .. })));
}

#[test]
fn geronimus_definition() {
    // L~((x - k) p) = L(p), and L~(1) = mass0.
    let fam = FamilySpec::laguerre(0.5).unwrap();
    let kind = FunctionalKind::Geronimus { k: -1.0, mass0: 0.7 };
    let one = apply_functional(&fam, kind, |_| 1.0, 0).unwrap();
    assert!((one - 0.7).abs() < 1e-14);
    let p = |x: f64| 1.0 - 2.0 * x + 0.3 * x * x * x;
    let lhs = apply_functional(&fam, kind, |x| (x + 1.0) * p(x), 4).unwrap();
    let rhs = apply_functional(&fam, FunctionalKind::Base, p, 3).unwrap();
    assert!(rel(lhs, rhs) < 1e-12);
}

#[test]
fn gram_examples() {
    let cheb = FamilySpec::chebyshev1();
    let g = orthogonality_residual(&cheb, FunctionalKind::Base, |n, x| eval_sequence(&cheb, n, x, false).values[n], 5)
        .unwrap();
    assert!(max_off_diagonal(&g) <= 1e-12);

    let ctx = KernelContext::from_family(&cheb, 2.0, 6).unwrap();
    let g = orthogonality_residual(&cheb, FunctionalKind::Christoffel { k: 2.0 }, |n, x| ctx.kernel_poly(n, x), 5)
        .unwrap();
    assert!(max_off_diagonal(&g) <= 1e-10);

    let lag = FamilySpec::laguerre(0.5).unwrap();
    let uv = UvarovData::new(&lag, -1.0, 0.3, 6).unwrap();
    let g = orthogonality_residual(&lag, FunctionalKind::Uvarov { k: -1.0, r0: 0.3 }, |n, x| uv.poly(n, x), 5).unwrap();
    assert!(max_off_diagonal(&g) <= 1e-9, "{:e}", max_off_diagonal(&g));
}

fn poly(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
}

fn kinds() -> Vec<FunctionalKind> {
    vec![
        FunctionalKind::Base,
        FunctionalKind::Christoffel { k: 2.5 },
        FunctionalKind::Geronimus { k: -1.5, mass0: 1.3 },
        FunctionalKind::Uvarov { k: 1.5, r0: 0.4 },
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn linearity(
        p in prop::collection::vec(-1.0f64..1.0, 11),
        q in prop::collection::vec(-1.0f64..1.0, 11),
        a in -2.0f64..2.0,
        b in -2.0f64..2.0,
        ki in 0usize..4,
    ) {
        let fam = FamilySpec::jacobi(0.3, 0.7).unwrap();
        let kind = kinds()[ki];
        let lp = apply_functional(&fam, kind, |x| poly(&p, x), 10).unwrap();
        let lq = apply_functional(&fam, kind, |x| poly(&q, x), 10).unwrap();
        let lc = apply_functional(&fam, kind, |x| a * poly(&p, x) + b * poly(&q, x), 10).unwrap();
        let scale = 1.0 + (a * lp).abs() + (b * lq).abs();
        prop_assert!((lc - a * lp - b * lq).abs() <= 1e-13 * scale);
    }

    #[test]
    fn christoffel_is_base_of_product(p in prop::collection::vec(-1.0f64..1.0, 1..10), k in 1.1f64..4.0) {
        let fam = FamilySpec::chebyshev1();
        let rule = gauss_rule(&fam, 8).unwrap();
        let f = |x: f64| poly(&p, x);
        let c = apply_with_rule(&rule, fam.support(), FunctionalKind::Christoffel { k }, &f).unwrap();
        let base = apply_with_rule(&rule, fam.support(), FunctionalKind::Base, &|x| (x - k) * f(x)).unwrap();
        prop_assert_eq!(c.to_bits(), base.to_bits());
    }

    #[test]
    fn uvarov_adds_point_mass(p in prop::collection::vec(-1.0f64..1.0, 1..8), r0 in 0.05f64..2.0) {
        let fam = FamilySpec::laguerre(0.5).unwrap();
        let f = |x: f64| poly(&p, x);
        let u = apply_functional(&fam, FunctionalKind::Uvarov { k: -1.0, r0 }, f, p.len()).unwrap();
        let base = apply_functional(&fam, FunctionalKind::Base, f, p.len()).unwrap();
        prop_assert!((u - base - r0 * f(-1.0)).abs() <= 1e-12 * (1.0 + base.abs()));
    }
}
