//! Oracles shared by the integration tests. None of these route through the
//! library's own quadrature, series or recurrence code.

#![allow(dead_code)]

use nalgebra::{DMatrix, SymmetricEigen};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

/// Gauss rule from `(c_n, lambda_n)` pairs (1-based, `lambda_1 = mu0`) via a dense eigen-solve.
pub fn dense_gauss(pairs: &[(f64, f64)], m: usize) -> (Vec<f64>, Vec<f64>) {
    let mut j = DMatrix::<f64>::zeros(m, m);
    for i in 0..m {
        j[(i, i)] = pairs[i].0;
        if i + 1 < m {
            let b = pairs[i + 1].1.sqrt();
            j[(i, i + 1)] = b;
            j[(i + 1, i)] = b;
        }
    }
    let eig = SymmetricEigen::new(j);
    let mu0 = pairs[0].1;
    let mut out: Vec<(f64, f64)> = (0..m)
        .map(|i| (eig.eigenvalues[i], mu0 * eig.eigenvectors[(0, i)].powi(2)))
        .collect();
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    out.into_iter().unzip()
}

/// Dense Gauss rule for a family, `m` nodes.
pub fn family_gauss(family: &opx_core::FamilySpec, m: usize) -> (Vec<f64>, Vec<f64>) {
    let pairs: Vec<(f64, f64)> = (1..=m).map(|n| family.coeff(n)).collect();
    dense_gauss(&pairs, m)
}

/// `(a)_n` as an explicit product.
pub fn pochhammer(a: f64, n: usize) -> f64 {
    (0..n).map(|i| a + i as f64).product()
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}


fn exact(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite input")
}

/// Partial sum of `pFq` with one lower parameter, in exact rational arithmetic.
fn exact_sum(tops: &[f64], bottom: f64, z: f64, terms: usize) -> BigRational {
    let tops: Vec<BigRational> = tops.iter().map(|&a| exact(a)).collect();
    let bottom = exact(bottom);
    let z = exact(z);
    let mut acc = BigRational::zero();
    let mut term = BigRational::one();
    for n in 0..terms {
        if term.is_zero() {
            break;
        }
        acc += &term;
        let i = BigRational::from_integer(n.into());
        let mut next = &term * &z;
        for a in &tops {
            next *= a + &i;
        }
        term = next / ((&bottom + &i) * (&i + BigRational::one()));
    }
    acc
}

/// `2F1(p, q; r; z)` summed term by term in rational arithmetic.
pub fn f21(p: f64, q: f64, r: f64, z: f64, terms: usize) -> f64 {
    exact_sum(&[p, q], r, z, terms).to_f64().unwrap_or(f64::NAN)
}

/// `1F1(p; r; z)` summed term by term.
pub fn f11(p: f64, r: f64, z: f64, terms: usize) -> f64 {
    exact_sum(&[p], r, z, terms).to_f64().unwrap_or(f64::NAN)
}

/// `F(p + 1) / F(p)` for a terminating series, with the division done before rounding.
pub fn terminating_ratio(tops: &[f64], bottom: f64, z: f64, terms: usize) -> f64 {
    let mut shifted = tops.to_vec();
    shifted[0] += 1.0;
    let den = exact_sum(tops, bottom, z, terms);
    (exact_sum(&shifted, bottom, z, terms) / den).to_f64().unwrap_or(f64::NAN)
}

/// `F(p + 1) / F(p)` from plain f64 partial sums. Only for well-conditioned series.
pub fn float_ratio(tops: &[f64], bottom: f64, z: f64, terms: usize) -> f64 {
    let sum = |tops: &[f64]| {
        let mut acc = 0.0;
        let mut term = 1.0;
        for n in 0..terms {
            acc += term;
            let i = n as f64;
            term *= tops.iter().map(|a| a + i).product::<f64>() * z / ((bottom + i) * (1.0 + i));
        }
        acc
    };
    let mut shifted = tops.to_vec();
    shifted[0] += 1.0;
    sum(&shifted) / sum(tops)
}

/// Maximum that lets NaN through.
pub fn nan_max(a: f64, b: f64) -> f64 {
    if a.is_nan() || b.is_nan() {
        f64::NAN
    } else {
        a.max(b)
    }
}

/// Monic Chebyshev polynomial of the first kind from the trigonometric form.
pub fn chebyshev_monic(n: usize, x: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let t = if x.abs() <= 1.0 {
        (n as f64 * x.acos()).cos()
    } else {
        let s = x.signum().powi(n as i32);
        s * (n as f64 * x.abs().acosh()).cosh()
    };
    2f64.powi(1 - n as i32) * t
}

/// Monic Laguerre polynomial from its explicit sum.
pub fn laguerre_monic(n: usize, gamma: f64, x: f64) -> f64 {
    laguerre_monic_scaled(n, gamma, x).0
}

/// Explicit monic Laguerre value together with the sum of absolute terms.
pub fn laguerre_monic_scaled(n: usize, gamma: f64, x: f64) -> (f64, f64) {
    // (-1)^n n! L_n^{(gamma)}(x) with L_n = sum_i (-1)^i binom(n+gamma, n-i) x^i / i!
    let mut s = 0.0;
    let mut a = 0.0;
    for i in 0..=n {
        let binom = pochhammer(gamma + i as f64 + 1.0, n - i) / factorial(n - i);
        let t = binom * x.powi(i as i32) / factorial(i);
        s += (-1f64).powi(i as i32) * t;
        a += t.abs();
    }
    ((-1f64).powi(n as i32) * factorial(n) * s, factorial(n) * a)
}

/// Leading coefficient of the interpolating polynomial through `(xs, ys)`.
pub fn leading_coefficient(xs: &[f64], ys: &[f64]) -> f64 {
    // Highest-order divided difference.
    let mut d = ys.to_vec();
    let n = xs.len();
    for level in 1..n {
        for i in (level..n).rev() {
            d[i] = (d[i] - d[i - 1]) / (xs[i] - xs[i - level]);
        }
    }
    d[n - 1]
}

/// Relative error with a unit floor.
pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}
