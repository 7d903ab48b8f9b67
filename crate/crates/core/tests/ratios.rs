mod common;

use std::f64::consts::PI;

use opx_core::ratios::{
    chain_params, chebyshev_quasi_limit, chebyshev_quasi_limit_exact, chebyshev_ratio_exact, confluent_cd,
    family_chain_sequence, gauss_cf_ratio, gauss_chain_sequence, hyp_series, jacobi_comparison, jacobi_e,
    jacobi_ratio_cf, kernel_ratio_limit, kummer_cf_ratio, kummer_d, laguerre_d, laguerre_ratio_cf,
    laguerre_same_param_comparison, minimal_parameters, HypKind,
};
use opx_core::{FamilySpec, KernelContext, OpxError, Support};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn families() -> Vec<FamilySpec> {
    vec![
        FamilySpec::chebyshev1(),
        FamilySpec::laguerre(0.5).unwrap(),
        FamilySpec::laguerre(2.0).unwrap(),
        FamilySpec::jacobi(0.3, 0.7).unwrap(),
        FamilySpec::jacobi(-0.5, 1.5).unwrap(),
    ]
}

fn outside_shifts(fam: &FamilySpec) -> Vec<f64> {
    match fam.support() {
        Support::Interval(a, b) => vec![a - 0.3, b + 0.01, b + 2.0],
        Support::HalfLine(a) => vec![a - 0.05, a - 1.0, a - 7.0],
        Support::RealLine => vec![0.0],
    }
}

#[test]
fn confluent_cd_examples() {
    for fam in families() {
        let (l, r) = confluent_cd(&fam, 0, 0.37);
        assert!((l - 1.0 / fam.mu0()).abs() < 1e-15 * l);
        assert!((r - 1.0 / fam.mu0()).abs() < 1e-15 * l);
    }
    let (l, r) = confluent_cd(&FamilySpec::chebyshev1(), 4, 0.3);
    assert!((l - r).abs() <= 1e-12 * l.abs());
    let (l, r) = confluent_cd(&FamilySpec::laguerre(0.5).unwrap(), 6, 2.0);
    assert!((l - r).abs() <= 1e-12 * l.abs());

    // Chebyshev lhs from T_j(cos t) = cos(j t), h_0 = pi, h_j = pi / 2^(2j-1).
    let t: f64 = 0.9;
    let x = t.cos();
    let mut lhs = 1.0 / PI;
    for j in 1..=7 {
        let p = (j as f64 * t).cos() / 2f64.powi(j - 1);
        lhs += p * p * 2f64.powi(2 * j - 1) / PI;
    }
    let (l, r) = confluent_cd(&FamilySpec::chebyshev1(), 7, x);
    assert!((l - lhs).abs() < 1e-13 * lhs);
    assert!((r - lhs).abs() < 1e-12 * lhs);
}

#[test]
fn lambda_products_are_squared_norms() {
    for fam in families() {
        let rec = fam.recurrence::<f64>(12);
        let h = rec.norms(10);
        let (xs, ws) = common::family_gauss(&fam, 14);
        for j in 0..=10 {
            let l2: f64 = xs
                .iter()
                .zip(&ws)
                .map(|(&x, &w)| {
                    let p = match fam.name().as_str() {
                        "chebyshev1" => common::chebyshev_monic(j, x),
                        _ => rec.eval(j, x)[j],
                    };
                    w * p * p
                })
                .sum();
            assert!((h[j] - l2).abs() < 1e-10 * l2, "{} j={j}: {} vs {l2}", fam.name(), h[j]);
        }
    }
    // Laguerre: h_j = j! Gamma(j + gamma + 1).
    let rec = FamilySpec::laguerre(0.5).unwrap().recurrence::<f64>(12);
    let h = rec.norms(10);
    let mut expected = statrs::function::gamma::gamma(1.5);
    for j in 0..=10 {
        if j > 0 {
            expected *= j as f64 * (j as f64 + 0.5);
        }
        assert!((h[j] - expected).abs() < 1e-13 * expected);
    }
}

#[test]
fn chebyshev_ratio_limit_at_one() {
    let ctx = KernelContext::<f64>::from_family(&FamilySpec::chebyshev1(), 1.0, 1002).unwrap();
    let mut prev = f64::INFINITY;
    for n in 1..=50 {
        let (up, down) = kernel_ratio_limit(&ctx, n).unwrap();
        // rho_j = P_j(1)^2 / h_j = 2/pi for j >= 1, 1/pi at j = 0, which gives 1/2 + 1/(2n+1).
        let exact = 0.5 + 1.0 / (2.0 * n as f64 + 1.0);
        assert!((up - exact).abs() < 1e-12 * exact, "n={n} {up}");
        assert_eq!(chebyshev_ratio_exact(n), exact);
        assert!((up * down - 1.0).abs() < 1e-12);
        assert!(up < prev && up > 0.5);
        prev = up;
    }
    let (up, _) = kernel_ratio_limit(&ctx, 1000).unwrap();
    assert!((up - 0.5).abs() < 1e-3);
    assert!(matches!(kernel_ratio_limit(&ctx, 2000), Err(OpxError::CoefficientsUnavailable(_))));
}

#[test]
fn ratio_limit_is_kernel_ratio_at_shift() {
    for fam in families() {
        for k in outside_shifts(&fam) {
            let ctx = KernelContext::<f64>::from_family(&fam, k, 14).unwrap();
            for n in 0..=10 {
                let (up, _) = kernel_ratio_limit(&ctx, n).unwrap();
                let direct = ctx.kernel_poly_sum(n + 1, k) / ctx.kernel_poly_sum(n, k);
                assert!((up - direct).abs() <= 1e-9 * direct.abs(), "{} k={k} n={n}", fam.name());
                // And against the divided form slightly away from k.
                let e = 1e-7 * (1.0 + k.abs());
                let near = ctx.kernel_poly_divided(n + 1, k + e) / ctx.kernel_poly_divided(n, k + e);
                assert!((up - near).abs() <= 1e-5 * direct.abs(), "{} k={k} n={n}", fam.name());
            }
        }
    }
}

#[test]
fn chebyshev_quasi_limit_value() {
    for n in 0..=30 {
        let v = chebyshev_quasi_limit(n).unwrap();
        assert!((v - chebyshev_quasi_limit_exact(n)).abs() < 1e-12 * v, "n={n}");
    }
}

#[test]
fn gauss_examples() {
    assert_eq!(gauss_cf_ratio(0.5, 1.5, 2.5, 0.0, 60).unwrap(), 1.0);
    for (q, r, z) in [(0.7, 1.9, 0.4), (2.0, 3.5, -0.8), (-1.5, 0.5, 3.0)] {
        let v = gauss_cf_ratio(-1.0, q, r, z, 1).unwrap();
        assert!((v - 1.0 / (1.0 - q / r * z)).abs() < 1e-14 * v.abs());
    }
    let v = gauss_cf_ratio(0.5, 1.5, 2.5, 0.3, 60).unwrap();
    let oracle = common::f21(1.5, 1.5, 2.5, 0.3, 200) / common::f21(0.5, 1.5, 2.5, 0.3, 200);
    assert!((v - oracle).abs() <= 1e-12 * oracle.abs());
    assert!(matches!(gauss_cf_ratio(0.5, 1.5, 2.5, 1.0, 60), Err(OpxError::Divergent(_))));
    assert!(matches!(gauss_cf_ratio(0.5, 1.5, -2.0, 0.3, 60), Err(OpxError::ParameterOutOfRange(_))));
}

#[test]
fn kummer_examples() {
    assert_eq!(kummer_cf_ratio(0.3, 1.5, 0.0, 40).unwrap(), 1.0);
    assert_eq!(kummer_d(0.3, 1.5, 1), 1.0 / 1.5);
    assert!((kummer_d(0.3, 1.5, 2) + 1.3 / (2.5 * 1.5)).abs() < 1e-16);
    let v = kummer_cf_ratio(-3.0, 1.5, -0.7, 40).unwrap();
    let oracle = common::terminating_ratio(&[-3.0], 1.5, -0.7, 10);
    assert!((v - oracle).abs() <= 1e-12 * oracle.abs());
    assert!(kummer_cf_ratio(0.3, 0.0, 0.5, 40).is_err());
}

#[test]
fn laguerre_fraction() {
    let (g, n) = (0.5, 4);
    assert!((laguerre_d(g, n, 2) - (n as f64 - 1.0) / ((g + 2.0) * (g + 3.0))).abs() < 1e-16);
    let r = laguerre_ratio_cf(g, n, 0.0, 40).unwrap();
    assert_eq!(r.cf_value, 1.0);
    let r = laguerre_ratio_cf(g, n, 1.2, 40).unwrap();
    let oracle = common::terminating_ratio(&[-(n as f64)], g + 2.0, -1.2, 10);
    assert!((r.cf_value - oracle).abs() <= 1e-11 * oracle.abs());
    // Same-parameter prefactor by direct Beta evaluation.
    let beta = |a: f64, b: f64| statrs::function::gamma::gamma(a) * statrs::function::gamma::gamma(b)
        / statrs::function::gamma::gamma(a + b);
    let pre = (beta(4.0, 2.5) / (4.0 * beta(4.0, 1.5))).sqrt() / 16.0;
    assert!((r.same_param_prefactor - pre).abs() < 1e-13 * pre);
    assert!(r.mixed_param_prefactor.is_some());
    assert!(laguerre_ratio_cf(0.0, 3, 1.0, 40).unwrap().mixed_param_prefactor.is_none());
    assert!(matches!(laguerre_ratio_cf(-1.5, 3, 1.0, 40), Err(OpxError::ParameterOutOfRange(_))));
    assert!(matches!(laguerre_ratio_cf(0.5, 0, 1.0, 40), Err(OpxError::ParameterOutOfRange(_))));

    // The comparison reports a finite discrepancy; its size is informational.
    let c = laguerre_same_param_comparison(g, n, 1.2, 40).unwrap();
    assert!(c.discrepancy.is_finite() && c.direct.is_finite());
    assert!((c.implied_prefactor * c.cf_value - c.direct).abs() < 1e-14 * c.direct.abs());
}

#[test]
fn jacobi_fraction() {
    let (g, d, n) = (0.3, 0.7, 3);
    assert!((jacobi_e(g, d, n, 1) - (n as f64 + g + d + 1.0) / (g + 2.0)).abs() < 1e-15);
    let r = jacobi_ratio_cf(g, d, n, 1.0, 40).unwrap();
    assert_eq!(r.cf_value, 1.0);
    let r = jacobi_ratio_cf(g, d, n, 0.4, 40).unwrap();
    let s = n as f64 + g + d + 1.0;
    let oracle = common::terminating_ratio(&[-3.0, s], g + 2.0, 0.3, 10);
    assert!((r.cf_value - oracle).abs() <= 1e-11 * oracle.abs());
    let expected = ((g + d + 2.0).powi(2) * (7.0 + g + d) * (6.0 + g + d).powi(3)
        / (32.0 * 27.0 * (4.0 + g) * (g + 1.0).powi(2) * d * d))
        .sqrt();
    assert!((r.prefactor - expected).abs() < 1e-14 * expected);
    assert!(jacobi_ratio_cf(g, 0.0, n, 0.4, 40).is_err());
    assert!(jacobi_ratio_cf(g, d, n, -1.0, 40).is_err());
    let c = jacobi_comparison(g, 1.7, n, 0.4, 40).unwrap();
    assert!(c.discrepancy.is_finite());
}

#[test]
fn series_examples() {
    assert_eq!(hyp_series(HypKind::Gauss { p: 0.4, q: 1.1, r: 2.2 }, 0.0, 50).unwrap(), 1.0);
    let (q, r, z) = (1.7, 2.3, 0.45);
    let v = hyp_series(HypKind::Gauss { p: -1.0, q, r }, z, 50).unwrap();
    assert!((v - (1.0 - q * z / r)).abs() < 1e-15);
    for z in [-1.3, 0.2, 2.5] {
        let v = hyp_series(HypKind::Kummer { p: -2.0, r: 1.0 }, z, 50).unwrap();
        let e: f64 = 1.0 - 2.0 * z + z * z / 2.0;
        assert!((v - e).abs() < 1e-14 * e.abs().max(1.0));
    }
    // Terminating Gauss series is fine beyond the unit disk.
    assert!(hyp_series(HypKind::Gauss { p: -3.0, q: 0.5, r: 1.5 }, 4.0, 50).is_ok());
    assert!(matches!(hyp_series(HypKind::Gauss { p: 0.5, q: 0.5, r: 1.5 }, 1.0, 50), Err(OpxError::Divergent(_))));
    assert!(matches!(hyp_series(HypKind::Kummer { p: 0.5, r: -1.0 }, 0.3, 50), Err(OpxError::ParameterOutOfRange(_))));
}

#[test]
fn chain_examples() {
    let s = chain_params(&[0.25; 100], 100).unwrap();
    assert_eq!(s.m[0], 0.0);
    for n in 1..=100 {
        let e = n as f64 / (2.0 * (n as f64 + 1.0));
        assert!((s.m[n] - e).abs() < 1e-14, "n={n}");
    }
    assert!(s.positive);

    let s = chain_params(&[0.3; 20], 20).unwrap();
    assert!(s.complementary.iter().all(|&k| (k - 0.7).abs() < 1e-16));
    let cm = s.complementary_m.clone().unwrap();
    assert_eq!(cm, minimal_parameters(&[0.7; 20]).unwrap());
    // A constant sequence is a chain sequence only up to 1/4.
    assert_eq!(s.complementary_positive, Some(false));
    assert!(!s.positive);
    assert!(chain_params(&[0.2; 200], 200).unwrap().positive);

    assert!(matches!(chain_params(&[0.3], 0), Err(OpxError::InvalidInput(_))));
    assert!(matches!(chain_params(&[0.3], 2), Err(OpxError::InvalidInput(_))));
    assert!(matches!(chain_params(&[1.0, 0.5], 2), Err(OpxError::DivisionByZero(2))));
}

#[test]
fn family_chain_sequences() {
    // Laguerre: c_n = 2n - 1 + gamma, lambda_{n+1} = n (n + gamma).
    let g = 0.5;
    let l = family_chain_sequence(&FamilySpec::laguerre(g).unwrap(), 10);
    for (i, &v) in l.iter().enumerate() {
        let n = (i + 1) as f64;
        let e = n * (n + g) / ((2.0 * n - 1.0 + g) * (2.0 * n + 1.0 + g));
        assert!((v - e).abs() < 1e-15);
    }
    assert!(chain_params(&l, 10).unwrap().positive);
}

#[test]
fn random_terminating_fractions() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..100 {
        let m = rng.gen_range(1..=8) as f64;
        let q = rng.gen_range(-3.0..3.0);
        let r = rng.gen_range(0.3..5.0);
        let z = rng.gen_range(-2.0..2.0);
        let g = gauss_cf_ratio(-m, q, r, z, 30).unwrap();
        let o = common::terminating_ratio(&[-m, q], r, z, 10);
        assert!((g - o).abs() <= 1e-10 * o.abs(), "gauss -{m},{q},{r},{z}: {g} vs {o}");
        let k = kummer_cf_ratio(-m, r, z, 30).unwrap();
        let o = common::terminating_ratio(&[-m], r, z, 10);
        assert!((k - o).abs() <= 1e-10 * o.abs(), "kummer -{m},{r},{z}: {k} vs {o}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn reciprocal_limits(fi in 0usize..5, si in 0usize..3, n in 0usize..=20) {
        let fam = &families()[fi];
        let k = outside_shifts(fam)[si];
        let ctx = KernelContext::<f64>::from_family(fam, k, 22).unwrap();
        let (up, down) = kernel_ratio_limit(&ctx, n).unwrap();
        prop_assert!((up * down - 1.0).abs() <= 1e-12, "{} k={k} n={n}", fam.name());
    }

    #[test]
    fn confluent_cd_holds(fi in 0usize..5, n in 0usize..=10, u in 0.0f64..1.0) {
        let fam = &families()[fi];
        let x = match fam.support() {
            Support::Interval(a, b) => a + (b - a) * u,
            Support::HalfLine(a) => a + 15.0 * u,
            Support::RealLine => 6.0 * u - 3.0,
        };
        let (l, r) = confluent_cd(fam, n, x);
        prop_assert!((l - r).abs() <= 1e-10 * l.abs());
    }

    #[test]
    fn gauss_chain_is_positive(p in 0.05f64..3.0, dq in 0.0f64..3.0, dr in 0.01f64..3.0) {
        let q = p + dq;
        let r = q + dr;
        let l = gauss_chain_sequence(p, q, r, 50);
        let s = chain_params(&l, 50).unwrap();
        prop_assert!(s.positive, "p={p} q={q} r={r}");
    }

    #[test]
    fn gauss_fraction_matches_terminating_series(
        m in 1u32..=10,
        q in -4.0f64..4.0,
        r in 0.2f64..6.0,
        z in -3.0f64..3.0,
    ) {
        let p = -(m as f64);
        let v = gauss_cf_ratio(p, q, r, z, 40).unwrap();
        let o = common::terminating_ratio(&[p, q], r, z, 12);
        prop_assume!(o.is_finite());
        prop_assert!((v - o).abs() <= 1e-10 * o.abs(), "{v} vs {o}");
    }

    #[test]
    fn kummer_fraction_matches_series(p in -3.0f64..3.0, r in 0.2f64..6.0, z in -0.5f64..0.5) {
        let v = kummer_cf_ratio(p, r, z, 60).unwrap();
        let o = common::float_ratio(&[p], r, z, 200);
        prop_assert!((v - o).abs() <= 1e-10 * o.abs(), "{v} vs {o}");
    }
}
