//! Gauss quadrature built from recurrence coefficients, and application of the
//! base, Christoffel, Geronimus and Uvarov functionals to polynomials.

use crate::error::{OpxError, Result};
use crate::families::{FamilySpec, Recurrence, Support};

/// Gauss rule `sum_i w_i f(x_i)`, exact for degree `<= 2 * order - 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub order: usize,
}

impl GaussRule {
    /// Apply to an integrand.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }

    /// Sum of weights.
    pub fn mass(&self) -> f64 {
        self.weights.iter().sum()
    }
}

/// Gauss rule with `m` nodes for `family`.
pub fn gauss_rule(family: &FamilySpec, m: usize) -> Result<GaussRule> {
    gauss_rule_from(&family.recurrence::<f64>(m), m)
}

/// Gauss rule with `m` nodes from a real recurrence table holding at least `m` pairs.
pub fn gauss_rule_from(rec: &Recurrence<f64>, m: usize) -> Result<GaussRule> {
    if m == 0 {
        return Err(OpxError::InvalidInput("quadrature order must be >= 1".into()));
    }
    if rec.len() < m {
        return Err(OpxError::CoefficientsUnavailable(rec.len()));
    }
    for n in 1..=m {
        let l = rec.lambda(n);
        if !(l > 0.0) || !l.is_finite() || !rec.c(n).is_finite() {
            return Err(OpxError::NotPositiveDefinite { index: n, value: l });
        }
    }
    let mut d: Vec<f64> = (1..=m).map(|n| rec.c(n)).collect();
    let mut e: Vec<f64> = (2..=m).map(|n| rec.lambda(n).sqrt()).collect();
    e.push(0.0);
    let mut z = vec![0.0; m];
    z[0] = 1.0;
    tridiagonal_ql(&mut d, &mut e, &mut z)?;
    let mu0 = rec.mu0();
    let mut pairs: Vec<(f64, f64)> = d.into_iter().zip(z).map(|(x, v)| (x, mu0 * v * v)).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let (nodes, weights) = pairs.into_iter().unzip();
    Ok(GaussRule { nodes, weights, order: m })
}

/// Implicit QL with Wilkinson shifts on a symmetric tridiagonal matrix.
///
/// `d` holds the diagonal, `e[i]` couples rows `i` and `i+1` (last entry unused).
/// Only the first row `z` of the eigenvector matrix is carried along.
fn tridiagonal_ql(d: &mut [f64], e: &mut [f64], z: &mut [f64]) -> Result<()> {
    let n = d.len();
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(OpxError::NonConvergent(
                    "tridiagonal eigen-solver exceeded iteration budget".into(),
                ));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            let mut early = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    early = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                let t = z[i + 1];
                z[i + 1] = s * z[i] + c * t;
                z[i] = c * z[i] - s * t;
            }
            if early {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

/// Monomial moments `L(x^j)`, `j = 0..=jmax`, from powers of the Jacobi matrix.
pub fn monomial_moments(rec: &Recurrence<f64>, jmax: usize) -> Vec<f64> {
    let size = jmax / 2 + 2;
    assert!(rec.len() >= size, "recurrence table too short for moment oracle");
    let diag: Vec<f64> = (1..=size).map(|n| rec.c(n)).collect();
    let off: Vec<f64> = (2..=size).map(|n| rec.lambda(n).sqrt()).collect();
    let mut v = vec![0.0; size];
    v[0] = 1.0;
    let mut out = Vec::with_capacity(jmax + 1);
    for _ in 0..=jmax {
        out.push(rec.mu0() * v[0]);
        let mut w = vec![0.0; size];
        for i in 0..size {
            let mut acc = diag[i] * v[i];
            if i > 0 {
                acc += off[i - 1] * v[i - 1];
            }
            if i + 1 < size {
                acc += off[i] * v[i + 1];
            }
            w[i] = acc;
        }
        v = w;
    }
    out
}

/// Which functional to apply.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FunctionalKind {
    /// `L(p)`.
    Base,
    /// `L((x-k) p)`.
    Christoffel { k: f64 },
    /// Inverse direction with free constant `mass0 = L~(1)`.
    Geronimus { k: f64, mass0: f64 },
    /// `L(p) + r0 p(k)`.
    Uvarov { k: f64, r0: f64 },
}

/// Number of Gauss nodes needed for a degree-`d` polynomial integrand.
pub fn rule_order(degree: usize) -> usize {
    degree.div_ceil(2) + 2
}

/// Applies `kind` to the polynomial `p` of known `degree`.
pub fn apply_functional<F: Fn(f64) -> f64>(
    family: &FamilySpec,
    kind: FunctionalKind,
    p: F,
    degree: usize,
) -> Result<f64> {
    let extra = usize::from(matches!(kind, FunctionalKind::Christoffel { .. }));
    let rule = gauss_rule(family, rule_order(degree + extra))?;
    apply_with_rule(&rule, family.support(), kind, &p)
}

/// Applies `kind` through a caller-provided rule; the rule must be exact for
/// the integrand degree.
pub fn apply_with_rule<F: Fn(f64) -> f64>(
    rule: &GaussRule,
    support: Support,
    kind: FunctionalKind,
    p: &F,
) -> Result<f64> {
    match kind {
        FunctionalKind::Base => Ok(rule.integrate(p)),
        FunctionalKind::Christoffel { k } => Ok(rule.integrate(|x| (x - k) * p(x))),
        FunctionalKind::Uvarov { k, r0 } => {
            if r0 == 0.0 {
                return Err(OpxError::ParameterOutOfRange("Uvarov mass must be nonzero".into()));
            }
            Ok(rule.integrate(p) + r0 * p(k))
        }
        FunctionalKind::Geronimus { k, mass0 } => {
            if support.contains(k) {
                return Err(OpxError::ShiftInsideSupport { shift: k });
            }
            let pk = p(k);
            Ok(rule.integrate(|x| (p(x) - pk) / (x - k)) + pk * mass0)
        }
    }
}

/// Normalized Gram matrix of `polys` (degree `j` at index `j`, `j = 0..=n_max`).
///
/// Entry `(n, m)` is `F(P_n P_m) / sqrt(|F(P_n^2) F(P_m^2)|)`.
pub fn orthogonality_residual<F: Fn(usize, f64) -> f64>(
    family: &FamilySpec,
    kind: FunctionalKind,
    polys: F,
    n_max: usize,
) -> Result<Vec<Vec<f64>>> {
    let rule = gauss_rule(family, rule_order(2 * n_max + 1))?;
    let mut g = vec![vec![0.0; n_max + 1]; n_max + 1];
    for n in 0..=n_max {
        for m in 0..=n {
            let v = apply_with_rule(&rule, family.support(), kind, &|x| polys(n, x) * polys(m, x))?;
            g[n][m] = v;
            g[m][n] = v;
        }
    }
    Ok(normalize_gram(g))
}

/// Scales a Gram matrix by its diagonal.
pub fn normalize_gram(mut g: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    let diag: Vec<f64> = (0..g.len()).map(|i| g[i][i].abs().sqrt()).collect();
    for (i, row) in g.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v /= diag[i] * diag[j];
        }
    }
    g
}

/// Largest off-diagonal magnitude of a square matrix.
pub fn max_off_diagonal(g: &[Vec<f64>]) -> f64 {
    let mut worst: f64 = 0.0;
    for (i, row) in g.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            if i != j {
                worst = worst.max(if v.is_nan() { f64::INFINITY } else { v.abs() });
            }
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn one_point_rule() {
        let r = gauss_rule(&FamilySpec::chebyshev1(), 1).unwrap();
        assert_eq!(r.nodes, vec![0.0]);
        assert!((r.weights[0] - PI).abs() < 1e-15);
    }

    #[test]
    fn two_point_chebyshev() {
        let r = gauss_rule(&FamilySpec::chebyshev1(), 2).unwrap();
        let h = 0.5f64.sqrt();
        assert!((r.nodes[0] + h).abs() < 1e-15 && (r.nodes[1] - h).abs() < 1e-15);
        assert!((r.weights[0] - PI / 2.0).abs() < 1e-14);
    }

    #[test]
    fn geronimus_rejects_shift_in_support() {
        let f = FamilySpec::chebyshev1();
        let e = apply_functional(&f, FunctionalKind::Geronimus { k: 0.5, mass0: 1.0 }, |x| x, 1);
        assert!(matches!(e, Err(OpxError::ShiftInsideSupport { .. })));
    }
}
