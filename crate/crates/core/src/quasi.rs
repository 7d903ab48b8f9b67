//! Quasi-type kernel polynomials of orders one and two, their difference
//! equation, and orthogonality criteria for order-`l` combinations.

use crate::error::{OpxError, Result};
use crate::families::Recurrence;
use crate::kernels::KernelContext;
use crate::scalar::Scalar;

/// Mixing coefficients of a quasi-type kernel polynomial.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum QuasiSpec {
    /// `a P*_{n+1} + b P*_n`.
    Order1 { a: f64, b: f64 },
    /// `P*_n + ltilde P*_{n-1} + mtilde P*_{n-2}`.
    Order2 { ltilde: f64, mtilde: f64 },
}

impl QuasiSpec {
    pub fn order(&self) -> usize {
        match self {
            QuasiSpec::Order1 { .. } => 1,
            QuasiSpec::Order2 { .. } => 2,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            QuasiSpec::Order1 { a, b } if a == 0.0 && b == 0.0 => Err(OpxError::InvalidInput(
                "order-one coefficients must not both vanish".into(),
            )),
            _ => Ok(()),
        }
    }
}

/// Evaluates the quasi-type kernel polynomial described by `spec`.
pub fn quasi_kernel<T: Scalar>(ctx: &KernelContext<T>, spec: QuasiSpec, n: usize, x: T) -> Result<T> {
    spec.validate()?;
    match spec {
        QuasiSpec::Order1 { a, b } => {
            if n + 1 > ctx.n_max() {
                return Err(OpxError::CoefficientsUnavailable(ctx.n_max()));
            }
            Ok(T::real(a) * ctx.kernel_poly(n + 1, x) + T::real(b) * ctx.kernel_poly(n, x))
        }
        QuasiSpec::Order2 { ltilde, mtilde } => {
            if n < 2 {
                return Err(OpxError::InvalidInput("order two needs degree n >= 2".into()));
            }
            if n > ctx.n_max() {
                return Err(OpxError::CoefficientsUnavailable(ctx.n_max()));
            }
            Ok(ctx.kernel_poly(n, x)
                + T::real(ltilde) * ctx.kernel_poly(n - 1, x)
                + T::real(mtilde) * ctx.kernel_poly(n - 2, x))
        }
    }
}

/// Linear polynomial `slope * x + intercept`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Linear<T> {
    pub slope: T,
    pub intercept: T,
}

impl<T: Scalar> Linear<T> {
    pub fn eval(&self, x: T) -> T {
        self.slope * x + self.intercept
    }
}

/// Coefficients of the three-term difference equation satisfied by
/// `Q*_n = P*_n + b P*_{n-1}` around index `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct DifferenceEqCoeffs<T> {
    pub n: usize,
    pub b: f64,
    /// `D_n(x) = x - c*_{n+1} + b`.
    pub d_n: Linear<T>,
    /// `D_{n+1}(x) = x - c*_{n+2} + b`.
    pub d_next: Linear<T>,
    /// `J_n(x) = b D_{n-1}(x) + lambda*_n`.
    pub j_n: Linear<T>,
    /// `J_{n+1}(x) = b D_n(x) + lambda*_{n+1}`.
    pub j_next: Linear<T>,
    /// `J_{n+2}(x) = b D_{n+1}(x) + lambda*_{n+2}`.
    pub j_next2: Linear<T>,
}

fn d_poly<T: Scalar>(cstar: T, b: f64) -> Linear<T> {
    Linear { slope: T::one(), intercept: T::real(b) - cstar }
}

fn j_poly<T: Scalar>(d: Linear<T>, lstar: T, b: f64) -> Linear<T> {
    let b = T::real(b);
    Linear { slope: b * d.slope, intercept: b * d.intercept + lstar }
}

/// Difference-equation coefficients for index `n >= 1`; needs the context valid to `n + 2`.
pub fn difference_equation_coeffs<T: Scalar>(
    ctx: &KernelContext<T>,
    b: f64,
    n: usize,
) -> Result<DifferenceEqCoeffs<T>> {
    if n == 0 {
        return Err(OpxError::InvalidInput("difference equation needs n >= 1".into()));
    }
    let star = ctx.kernel_recurrence(n + 2).map_err(|_| OpxError::CoefficientsUnavailable(ctx.n_max()))?;
    let c = |i: usize| star[i - 1].0;
    let l = |i: usize| star[i - 1].1;
    let d_prev = d_poly(c(n), b);
    let d_n = d_poly(c(n + 1), b);
    let d_next = d_poly(c(n + 2), b);
    Ok(DifferenceEqCoeffs {
        n,
        b,
        d_n,
        d_next,
        j_n: j_poly(d_prev, l(n), b),
        j_next: j_poly(d_n, l(n + 1), b),
        j_next2: j_poly(d_next, l(n + 2), b),
    })
}

/// Determinant `b^2 + lambda*_{n+1} + (x - c*_{n+1}) b` of the 2x2 system that
/// expresses `P*_n, P*_{n-1}` through `Q*_{n+1}, Q*_n`.
pub fn matrix_denominator<T: Scalar>(ctx: &KernelContext<T>, b: f64, n: usize) -> Result<Linear<T>> {
    let star = ctx.kernel_recurrence(n + 1)?;
    let (c, l) = star[n];
    let bb = T::real(b);
    Ok(Linear { slope: bb, intercept: bb * bb + l - c * bb })
}

/// Residuals of the two forms of the difference equation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DifferenceResidual {
    /// `|J_n Q_{n+2} - [D_{n+1} J_n - b J_{n+1}] Q_{n+1} + lambda*_{n+1} J_{n+1} Q_n|`.
    pub stated: f64,
    /// `|J_{n+1} Q_{n+2} - [D_{n+1} J_{n+1} - b J_{n+2}] Q_{n+1} + lambda*_{n+1} J_{n+2} Q_n|`.
    pub proof: f64,
    /// Largest term magnitude in the proof form, for relative scaling.
    pub scale: f64,
}

/// Evaluates both difference-equation forms at `x`.
pub fn difference_equation_residual<T: Scalar>(
    ctx: &KernelContext<T>,
    b: f64,
    n: usize,
    x: T,
) -> Result<DifferenceResidual> {
    let co = difference_equation_coeffs(ctx, b, n)?;
    let lstar = ctx.kernel_recurrence(n + 1)?[n].1;
    let bb = T::real(b);
    let q = |m: usize| ctx.kernel_poly(m, x) + bb * ctx.kernel_poly(m - 1, x);
    let (q0, q1, q2) = (q(n), q(n + 1), q(n + 2));
    let d1 = co.d_next.eval(x);
    let (jn, jn1, jn2) = (co.j_n.eval(x), co.j_next.eval(x), co.j_next2.eval(x));

    let stated = jn * q2 - (d1 * jn - bb * jn1) * q1 + lstar * jn1 * q0;

    // Proof route: eliminate P*_n, P*_{n-1} through the 2x2 system whose
    // determinant is J_{n+1}.
    let lhs_terms = [jn1 * q2, d1 * jn1 * q1, bb * jn2 * q1, lstar * jn2 * q0];
    let proof = (jn1 * q2 - (d1 * jn1 - bb * jn2) * q1 + lstar * jn2 * q0).modulus();
    let scale = lhs_terms.iter().map(|t| t.modulus()).fold(1.0, f64::max);
    Ok(DifferenceResidual { stated: stated.modulus(), proof, scale })
}

/// Outcome of the order-`l` orthogonality criteria.
#[derive(Debug, Clone, PartialEq)]
pub struct QkOrthogonalityReport {
    /// All criteria hold.
    pub satisfied: bool,
    /// `(n + 1, c~*_{n+1})` from the closed form, `n >= l + 1`.
    pub tilde_c: Vec<(usize, f64)>,
    /// `(n + 1, lambda~*_{n+1})` from the closed form, `n >= l + 1`.
    pub tilde_lambda: Vec<(usize, f64)>,
    /// Tags from `{"(i)", "(ii)", "(iii)"}`.
    pub violated_conditions: Vec<String>,
    /// `(n + 1, c, lambda)` fitted by peeling the three-term relation.
    pub fitted: Vec<(usize, f64, f64)>,
    /// Largest coefficient beyond the three-term band, relative.
    pub favard_residual: f64,
    /// Largest off-diagonal normalized Gram entry under the moment-solved functional.
    pub gram_residual: f64,
    /// Gram test verdict.
    pub gram_orthogonal: bool,
}

/// Criteria check from a context; the context must hold degrees up to `2 * n_max + 2`.
pub fn qk_orthogonality_check(
    ctx: &KernelContext<f64>,
    alphas: &[f64],
    n_max: usize,
    tol: f64,
) -> Result<QkOrthogonalityReport> {
    let table = ctx.kernel_table(ctx.n_max())?;
    qk_orthogonality_check_table(&table, alphas, n_max, tol)
}

/// Coefficient vectors (in the starred basis) of `Q_0..Q_top`.
fn q_basis(alphas: &[f64], top: usize) -> Vec<Vec<f64>> {
    (0..=top)
        .map(|n| {
            let mut v = vec![0.0; n + 1];
            v[n] = 1.0;
            for (m, &a) in alphas.iter().enumerate() {
                let m = m + 1;
                if m <= n {
                    v[n - m] = a;
                }
            }
            v
        })
        .collect()
}

/// Multiplication by `x` in the starred basis.
fn times_x(star: &Recurrence<f64>, v: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; v.len() + 1];
    for (j, &a) in v.iter().enumerate() {
        if a == 0.0 {
            continue;
        }
        out[j + 1] += a;
        out[j] += a * star.c(j + 1);
        if j >= 1 {
            out[j - 1] += a * star.lambda(j + 1);
        }
    }
    out
}

/// Re-expand a starred-basis vector in the `Q` basis.
fn to_q_basis(q: &[Vec<f64>], v: &[f64]) -> Vec<f64> {
    let mut r = v.to_vec();
    let mut t = vec![0.0; r.len()];
    for d in (0..r.len()).rev() {
        t[d] = r[d];
        if t[d] != 0.0 {
            for (i, &a) in q[d].iter().enumerate() {
                r[i] -= t[d] * a;
            }
        }
    }
    t
}

/// Criteria check over an explicit starred recurrence table `(c*_n, lambda*_n)`.
///
/// The table needs at least `2 * n_max + 2` pairs for the Gram cross-check.
pub fn qk_orthogonality_check_table(
    star: &Recurrence<f64>,
    alphas: &[f64],
    n_max: usize,
    tol: f64,
) -> Result<QkOrthogonalityReport> {
    let l = alphas.len();
    if l == 0 || alphas[l - 1] == 0.0 {
        return Err(OpxError::InvalidAlphas("the last alpha must be nonzero".into()));
    }
    if n_max < l + 2 {
        return Err(OpxError::InvalidInput(format!("n_max must be at least l + 2 = {}", l + 2)));
    }
    if star.len() < 2 * n_max + 2 {
        return Err(OpxError::CoefficientsUnavailable(star.len()));
    }
    let c = |i: usize| star.c(i);
    let lam = |i: usize| star.lambda(i);
    let alpha = |m: usize| if m == 0 { 1.0 } else { alphas[m - 1] };
    let close = |a: f64, b: f64, s: f64| (a - b).abs() <= tol * s.max(1.0);
    let mut violated = Vec::new();

    // Three-term fit by peeling x Q_n - Q_{n+1}.
    let q = q_basis(alphas, 2 * n_max + 1);
    let mut fitted = Vec::new();
    let mut favard: f64 = 0.0;
    let mut cond_i = true;
    for n in 0..n_max {
        let mut r = times_x(star, &q[n]);
        for (i, a) in q[n + 1].iter().enumerate() {
            r[i] -= a;
        }
        r.truncate(n + 1);
        let t = to_q_basis(&q, &r);
        let ct = t[n];
        let lt = if n >= 1 { t[n - 1] } else { 0.0 };
        let scale = ct.abs().max(lt.abs()).max(1.0);
        let band = if n >= 2 { t[..n - 1].iter().fold(0.0f64, |m, v| m.max(v.abs())) } else { 0.0 };
        favard = favard.max(band / scale);
        fitted.push((n + 1, ct, lt));
        if n <= l && (band > tol * scale || (n >= 1 && lt.abs() <= tol * scale)) {
            cond_i = false;
        }
    }
    if !cond_i {
        violated.push("(i)".to_string());
    }

    // Condition (ii), n > l + 1.
    let mut cond_ii = true;
    for n in (l + 2)..=n_max {
        let common = alpha(1) * (c(n + 1) - c(n));
        let s = lam(n + 1).abs().max(lam(n - l + 1).abs()).max(common.abs());
        if !close(lam(n + 1) - lam(n - l + 1), common, s) || common.abs() <= tol * s.max(1.0) {
            cond_ii = false;
        }
        for m in 1..=l {
            let v = alpha(m) * (c(n - m + 1) - c(n + 1))
                + alpha(m - 1) * (lam(n - m + 2) - lam(n + 1) - alpha(1) * (c(n) - c(n + 1)));
            let s = lam(n + 1).abs().max(c(n + 1).abs()).max(1.0);
            if v.abs() > tol * s {
                cond_ii = false;
            }
        }
    }
    if !cond_ii {
        violated.push("(ii)".to_string());
    }

    // Condition (iii); for degrees up to l the combination is truncated, so
    // the Fourier coefficients of Q_l are the alphas themselves.
    let mut cond_iii = true;
    let base = lam(l + 2) - alpha(1) * (c(l + 2) - c(l + 1));
    if base.abs() <= tol * lam(l + 2).abs().max(1.0) {
        cond_iii = false;
    }
    let rhs_factor = lam(l + 2) - alpha(1) * (c(l + 1) - c(l + 2));
    for m in 1..l {
        let lhs = alpha(m + 1) * (c(l - m + 1) - c(l + 2)) + alpha(m) * lam(l - m + 2);
        let rhs = alpha(m) * rhs_factor;
        if !close(lhs, rhs, lhs.abs().max(rhs.abs())) {
            cond_iii = false;
        }
    }
    let lhs = alpha(l) * lam(l + 2) + alpha(1) * alpha(l) * (c(l + 1) - c(l + 2));
    let rhs = alpha(l) * lam(2);
    if !close(lhs, rhs, lhs.abs().max(rhs.abs())) {
        cond_iii = false;
    }
    if !cond_iii {
        violated.push("(iii)".to_string());
    }

    let mut tilde_c = Vec::new();
    let mut tilde_lambda = Vec::new();
    for n in (l + 1)..=n_max {
        tilde_c.push((n + 1, c(n + 1)));
        tilde_lambda.push((n + 1, lam(n + 1) + alpha(1) * (c(n) - c(n + 1))));
    }

    // Moment-solved functional: M(Q_j) = delta_{j0}; M(Q_n Q_m) by applying
    // Q_m(X) to the vector of Q_n.
    let mut gram = vec![vec![0.0; n_max + 1]; n_max + 1];
    for n in 0..=n_max {
        for m in 0..=n_max {
            let v = apply_poly(star, &q[m], &q[n]);
            gram[n][m] = to_q_basis(&q, &v)[0];
        }
    }
    let mut gram_res: f64 = 0.0;
    let mut diag_ok = true;
    for n in 0..=n_max {
        if gram[n][n].abs() <= tol {
            diag_ok = false;
        }
    }
    for n in 0..=n_max {
        for m in 0..=n_max {
            if n != m {
                let s = (gram[n][n].abs() * gram[m][m].abs()).sqrt();
                gram_res = gram_res.max(if s > 0.0 { gram[n][m].abs() / s } else { f64::INFINITY });
            }
        }
    }

    Ok(QkOrthogonalityReport {
        satisfied: violated.is_empty(),
        tilde_c,
        tilde_lambda,
        violated_conditions: violated,
        fitted,
        favard_residual: favard,
        gram_residual: gram_res,
        gram_orthogonal: diag_ok && gram_res <= tol,
    })
}

/// `p(X) v` where `p` is given by its starred-basis coefficients.
fn apply_poly(star: &Recurrence<f64>, p: &[f64], v: &[f64]) -> Vec<f64> {
    let size = v.len() + p.len();
    let pad = |mut w: Vec<f64>| {
        w.resize(size, 0.0);
        w
    };
    let mut out = vec![0.0; size];
    let mut prev: Vec<f64> = vec![0.0; size];
    let mut cur = pad(v.to_vec());
    for (i, &a) in p.iter().enumerate() {
        if a != 0.0 {
            for (o, w) in out.iter_mut().zip(&cur) {
                *o += a * w;
            }
        }
        if i + 1 == p.len() {
            break;
        }
        let mut next = pad(times_x(star, &cur[..size - 1]));
        for (j, w) in next.iter_mut().enumerate() {
            *w -= star.c(i + 1) * cur[j];
            if i >= 1 {
                *w -= star.lambda(i + 1) * prev[j];
            }
        }
        prev = cur;
        cur = next;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn engineered(len: usize) -> Recurrence<f64> {
        let c = (1..=len).map(|n| n as f64).collect();
        let l = (1..=len).map(|n| 1.0 + 0.5 * n as f64).collect();
        Recurrence::new(c, l).unwrap()
    }

    #[test]
    fn engineered_order_one_is_orthogonal() {
        let r = qk_orthogonality_check_table(&engineered(30), &[0.5], 8, 1e-8).unwrap();
        assert!(r.satisfied, "{:?}", r.violated_conditions);
        assert!(r.gram_orthogonal, "gram residual {}", r.gram_residual);
    }

    #[test]
    fn zero_last_alpha_rejected() {
        assert!(matches!(
            qk_orthogonality_check_table(&engineered(30), &[0.5, 0.0], 8, 1e-8),
            Err(OpxError::InvalidAlphas(_))
        ));
    }
}
