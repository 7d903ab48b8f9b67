//! Confluent Christoffel-Darboux identity, limits of kernel ratios at the
//! shift, continued fractions for hypergeometric ratios and chain sequences.

pub mod cf;
pub mod chain;
pub mod hyper;

use statrs::function::beta::ln_beta;

use crate::error::{OpxError, Result};
use crate::families::FamilySpec;
use crate::kernels::KernelContext;
use crate::scalar::Scalar;

pub use cf::{CfValue, ContinuedFraction, Sign};
pub use chain::{chain_params, family_chain_sequence, minimal_parameters, ChainSequence};
pub use hyper::{hyp_series, hyp_series_scaled, is_nonpositive_integer, HypKind};

/// Both sides of the confluent Christoffel-Darboux identity at `x`.
///
/// `lhs = sum_{j<=n} P_j(x)^2 / h_j`, `rhs = (P'_{n+1} P_n - P_{n+1} P'_n) / h_n`.
pub fn confluent_cd<T: Scalar>(family: &FamilySpec, n: usize, x: T) -> (T, T) {
    let rec = family.recurrence::<T>(n + 2);
    let (p, d) = rec.eval_with_derivs(n + 1, x);
    let h = rec.norms(n);
    let lhs = (0..=n).fold(T::zero(), |a, j| a + p[j] * p[j] / h[j]);
    let rhs = (d[n + 1] * p[n] - p[n + 1] * d[n]) / h[n];
    (lhs, rhs)
}

/// Limits at `x = k` of `P*_{n+1}/P*_n` (`r_up`) and of its reciprocal (`r_down`).
///
/// Needs `n <= ctx.n_max()`.
pub fn kernel_ratio_limit<T: Scalar>(ctx: &KernelContext<T>, n: usize) -> Result<(T, T)> {
    if n > ctx.n_max() {
        return Err(OpxError::CoefficientsUnavailable(ctx.n_max()));
    }
    let lam = ctx.recurrence().lambda(n + 2);
    let r = ctx.ratio(n + 1);
    let rho = ctx.rho(n + 1);
    let up = lam / r * (T::one() + rho / ctx.cd_partials[n]);
    let down = r / lam * (T::one() - rho / ctx.cd_partials[n + 1]);
    Ok((up, down))
}

/// Published closed form for the Chebyshev ratio limit at `k = 1`.
pub fn chebyshev_ratio_published(n: usize) -> f64 {
    0.5 * (1.0 + 4.0 / (2.0 * n as f64 + 1.0))
}

/// Exact Chebyshev ratio limit at `k = 1`, obtained from `rho_j = 2/pi` (`j >= 1`).
pub fn chebyshev_ratio_exact(n: usize) -> f64 {
    0.5 * (1.0 + 2.0 / (2.0 * n as f64 + 1.0))
}

/// `C_{n+1}(1) / P*_{n+1}(1; 1)` on Chebyshev polynomials at `k = 1`, where
/// `C_{n+1} = P*_{n+1} - (lambda_{n+2}/r_{n+1}) P*_n`, using the summed kernel form.
pub fn chebyshev_quasi_limit(n: usize) -> Result<f64> {
    let ctx = KernelContext::<f64>::from_family(&FamilySpec::chebyshev1(), 1.0, n + 1)?;
    let coef = ctx.recurrence().lambda(n + 2) / ctx.ratio(n + 1);
    let top = ctx.kernel_poly_sum(n + 1, 1.0);
    Ok((top - coef * ctx.kernel_poly_sum(n, 1.0)) / top)
}

/// Published value of [`chebyshev_quasi_limit`].
pub fn chebyshev_quasi_limit_published(n: usize) -> f64 {
    4.0 / (3.0 + 2.0 * n as f64)
}

/// Exact value of [`chebyshev_quasi_limit`].
pub fn chebyshev_quasi_limit_exact(n: usize) -> f64 {
    2.0 / (2.0 * n as f64 + 3.0)
}

fn check_lower(r: f64) -> Result<()> {
    if is_nonpositive_integer(r) || !r.is_finite() {
        return Err(OpxError::ParameterOutOfRange(format!(
            "lower parameter {r} must not be a nonpositive integer"
        )));
    }
    Ok(())
}

/// Coefficient `g_j` of the Gauss fraction, `g_0 = 0`.
pub fn gauss_g(p: f64, q: f64, r: f64, j: usize) -> f64 {
    if j == 0 {
        return 0.0;
    }
    let k = j.div_ceil(2) as f64;
    if j % 2 == 0 {
        (p + k) / (r + 2.0 * k - 1.0)
    } else {
        (q + k - 1.0) / (r + 2.0 * k - 2.0)
    }
}

/// Fraction for `F(p+1, q; r; z) / F(p, q; r; z)`.
pub fn gauss_cf(p: f64, q: f64, r: f64, z: f64) -> ContinuedFraction<'static> {
    ContinuedFraction::new(1.0, z, move |j| {
        ((1.0 - gauss_g(p, q, r, j - 1)) * gauss_g(p, q, r, j), Sign::Minus)
    })
}

/// `F(p+1, q; r; z) / F(p, q; r; z)` by continued fraction, starting at `depth`.
pub fn gauss_cf_ratio(p: f64, q: f64, r: f64, z: f64, depth: usize) -> Result<f64> {
    gauss_cf_eval(p, q, r, z, depth).map(|v| v.value)
}

/// As [`gauss_cf_ratio`], with depth and floor information.
pub fn gauss_cf_eval(p: f64, q: f64, r: f64, z: f64, depth: usize) -> Result<CfValue> {
    check_lower(r)?;
    let terminating = is_nonpositive_integer(p) || is_nonpositive_integer(q);
    if !terminating && z.abs() >= 1.0 {
        return Err(OpxError::Divergent(z.abs()));
    }
    gauss_cf(p, q, r, z).evaluate_adaptive(depth)
}

/// Coefficient `d_j` of the Kummer fraction (`j >= 1`).
pub fn kummer_d(p: f64, r: f64, j: usize) -> f64 {
    assert!(j >= 1);
    if j == 1 {
        return 1.0 / r;
    }
    let k = j.div_ceil(2) as f64;
    if j % 2 == 0 {
        -(p + k) / ((r + 2.0 * k - 1.0) * (r + 2.0 * k - 2.0))
    } else {
        (r - p + k - 2.0) / ((r + 2.0 * k - 3.0) * (r + 2.0 * k - 2.0))
    }
}

/// Published form of `d_j`; its odd entries differ from [`kummer_d`] for `j >= 3`.
pub fn kummer_d_published(p: f64, r: f64, j: usize) -> f64 {
    if j % 2 == 1 && j >= 3 {
        let k = j.div_ceil(2) as f64;
        (r - p + k - 1.0) / ((r + 2.0 * k - 1.0) * (r + 2.0 * k - 2.0))
    } else {
        kummer_d(p, r, j)
    }
}

/// Fraction for `phi(p+1; r; z) / phi(p; r; z)`.
pub fn kummer_cf(p: f64, r: f64, z: f64) -> ContinuedFraction<'static> {
    ContinuedFraction::new(1.0, z, move |j| (kummer_d(p, r, j), Sign::Minus))
}

/// `phi(p+1; r; z) / phi(p; r; z)` by continued fraction, starting at `depth`.
pub fn kummer_cf_ratio(p: f64, r: f64, z: f64, depth: usize) -> Result<f64> {
    check_lower(r)?;
    kummer_cf(p, r, z).evaluate_adaptive(depth).map(|v| v.value)
}

/// Same fraction built on [`kummer_d_published`].
pub fn kummer_cf_ratio_published(p: f64, r: f64, z: f64, depth: usize) -> Result<f64> {
    check_lower(r)?;
    ContinuedFraction::new(1.0, z, move |j| (kummer_d_published(p, r, j), Sign::Minus))
        .evaluate_adaptive(depth)
        .map(|v| v.value)
}

/// Coefficient of the plus-signed Laguerre fraction in `x`, equal to
/// `kummer_d(-n, gamma + 2, j)`.
pub fn laguerre_d(gamma: f64, n: usize, j: usize) -> f64 {
    kummer_d(-(n as f64), gamma + 2.0, j)
}

/// Published odd Laguerre coefficient `(gamma+n+k+1)/((gamma+2k)(gamma+2k+1))`.
pub fn laguerre_d_published(gamma: f64, n: usize, j: usize) -> f64 {
    if j % 2 == 1 && j >= 3 {
        let k = j.div_ceil(2) as f64;
        (gamma + n as f64 + k + 1.0) / ((gamma + 2.0 * k) * (gamma + 2.0 * k + 1.0))
    } else {
        laguerre_d(gamma, n, j)
    }
}

/// Coefficient `d'_j` of the mixed-parameter fraction, with its alternating sign.
pub fn laguerre_mixed_d(gamma: f64, n: usize, j: usize) -> (f64, Sign) {
    assert!(j >= 1);
    let n = n as f64;
    if j % 2 == 1 {
        let k = ((j - 1) / 2) as f64;
        let den = (gamma + 2.0 * k + 1.0) * (gamma + 2.0 * k + 2.0);
        ((n + k + gamma + 1.0) / den, Sign::Plus)
    } else {
        let k = ((j - 2) / 2) as f64;
        let den = (gamma + 2.0 * k + 1.0) * (gamma + 2.0 * k + 2.0);
        ((1.0 - n + k) / den, Sign::Minus)
    }
}

/// Laguerre fraction value and prefactors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaguerreRatio {
    /// Fraction for `phi(-n+1; gamma+2; -x) / phi(-n; gamma+2; -x)`.
    pub cf_value: f64,
    /// `(1/n^2) sqrt(B(n, gamma+2) / (n B(n, gamma+1)))`.
    pub same_param_prefactor: f64,
    /// `gamma^2 / (n^{3/2} (n+gamma) (gamma+1) (n+gamma-1))`, for `gamma > 0`.
    pub mixed_param_prefactor: Option<f64>,
    /// Mixed-parameter fraction with alternating signs, for `gamma > 0`.
    pub mixed_cf_value: Option<f64>,
    pub floored: bool,
}

/// Laguerre kernel-ratio fraction at degree `n` and point `x`.
pub fn laguerre_ratio_cf(gamma: f64, n: usize, x: f64, depth: usize) -> Result<LaguerreRatio> {
    if !(gamma > -1.0) {
        return Err(OpxError::ParameterOutOfRange(format!("gamma = {gamma} must exceed -1")));
    }
    if n == 0 {
        return Err(OpxError::ParameterOutOfRange("n must be at least 1".into()));
    }
    let cf = ContinuedFraction::new(1.0, x, move |j| (laguerre_d(gamma, n, j), Sign::Plus))
        .evaluate_adaptive(depth)?;
    let nf = n as f64;
    let same = ((ln_beta(nf, gamma + 2.0) - ln_beta(nf, gamma + 1.0) - nf.ln()) * 0.5).exp()
        / (nf * nf);
    let (mixed, mixed_cf) = if gamma > 0.0 {
        let pre = gamma * gamma / (nf.powf(1.5) * (nf + gamma) * (gamma + 1.0) * (nf + gamma - 1.0));
        let v = ContinuedFraction::new(1.0, x, move |j| laguerre_mixed_d(gamma, n, j))
            .evaluate_adaptive(depth)?;
        (Some(pre), Some(v.value))
    } else {
        (None, None)
    };
    Ok(LaguerreRatio {
        cf_value: cf.value,
        same_param_prefactor: same,
        mixed_param_prefactor: mixed,
        mixed_cf_value: mixed_cf,
        floored: cf.floored,
    })
}

/// Jacobi fraction value and its prefactor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacobiRatio {
    /// `F(-n+1, n+gamma+delta+1; gamma+2; z) / F(-n, n+gamma+delta+1; gamma+2; z)`, `z = (1-x)/2`.
    pub cf_value: f64,
    /// `C(n, gamma, delta)`.
    pub prefactor: f64,
}

/// Coefficient `e_j`, the Gauss `g_j` at `(-n, n+gamma+delta+1; gamma+2)`.
pub fn jacobi_e(gamma: f64, delta: f64, n: usize, j: usize) -> f64 {
    let nf = n as f64;
    gauss_g(-nf, nf + gamma + delta + 1.0, gamma + 2.0, j)
}

/// `C(n, gamma, delta)`.
pub fn jacobi_prefactor(gamma: f64, delta: f64, n: usize) -> f64 {
    let nf = n as f64;
    let s = gamma + delta;
    let num = (s + 2.0).powi(2) * (2.0 * nf + s + 1.0) * (2.0 * nf + s).powi(3);
    let den = 32.0 * nf.powi(3) * (nf + gamma + 1.0) * (gamma + 1.0).powi(2) * delta * delta;
    (num / den).sqrt()
}

/// Jacobi kernel-ratio fraction at degree `n` and point `x`.
pub fn jacobi_ratio_cf(gamma: f64, delta: f64, n: usize, x: f64, depth: usize) -> Result<JacobiRatio> {
    if !(gamma > -1.0) || !(delta > 0.0) {
        return Err(OpxError::ParameterOutOfRange(format!(
            "need gamma > -1 and delta > 0, got ({gamma}, {delta})"
        )));
    }
    if n == 0 {
        return Err(OpxError::ParameterOutOfRange("n must be at least 1".into()));
    }
    if !(x > -1.0 && x <= 1.0) {
        return Err(OpxError::ParameterOutOfRange(format!("x = {x} outside (-1, 1]")));
    }
    let nf = n as f64;
    let z = (1.0 - x) / 2.0;
    let v = gauss_cf_eval(-nf, nf + gamma + delta + 1.0, gamma + 2.0, z, depth)?;
    Ok(JacobiRatio { cf_value: v.value, prefactor: jacobi_prefactor(gamma, delta, n) })
}

/// A published prefactor set against a directly computed kernel ratio.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrefactorComparison {
    pub cf_value: f64,
    pub prefactor: f64,
    /// Kernel-polynomial ratio evaluated from the recurrence.
    pub direct: f64,
    /// `direct / cf_value`: the prefactor that would make the formula exact.
    pub implied_prefactor: f64,
    /// `prefactor * cf_value / direct`; 1 when the published formula holds.
    pub discrepancy: f64,
}

impl PrefactorComparison {
    fn new(cf_value: f64, prefactor: f64, direct: f64) -> Self {
        PrefactorComparison {
            cf_value,
            prefactor,
            direct,
            implied_prefactor: direct / cf_value,
            discrepancy: prefactor * cf_value / direct,
        }
    }
}

fn kernel_at(family: &FamilySpec, k: f64, n: usize, y: f64) -> Result<f64> {
    let ctx = KernelContext::<f64>::from_family(family, k, n)?;
    Ok(ctx.kernel_poly(n, y))
}

/// Same-parameter Laguerre ratio `P*_{n-1}(0; -x) / P*_n(0; -x)` against
/// `same_param_prefactor * cf_value`.
pub fn laguerre_same_param_comparison(gamma: f64, n: usize, x: f64, depth: usize) -> Result<PrefactorComparison> {
    let lr = laguerre_ratio_cf(gamma, n, x, depth)?;
    let fam = FamilySpec::laguerre(gamma)?;
    let direct = kernel_at(&fam, 0.0, n - 1, -x)? / kernel_at(&fam, 0.0, n, -x)?;
    Ok(PrefactorComparison::new(lr.cf_value, lr.same_param_prefactor, direct))
}

/// Mixed-parameter Laguerre ratio: kernel of degree `n-1` for parameter `gamma`
/// over kernel of degree `n` for parameter `gamma - 1`, both at `k = 0` and
/// evaluated at `-x`, against the alternating-sign fraction. The target ratio
/// `phi(-n+1; gamma+2; -x) / phi(-n; gamma+1; -x)` is returned as well.
pub fn laguerre_mixed_comparison(
    gamma: f64,
    n: usize,
    x: f64,
    depth: usize,
) -> Result<(PrefactorComparison, f64)> {
    if !(gamma > 0.0) {
        return Err(OpxError::ParameterOutOfRange(format!("gamma = {gamma} must be positive")));
    }
    let lr = laguerre_ratio_cf(gamma, n, x, depth)?;
    let top = kernel_at(&FamilySpec::laguerre(gamma)?, 0.0, n - 1, -x)?;
    let bottom = kernel_at(&FamilySpec::laguerre(gamma - 1.0)?, 0.0, n, -x)?;
    let nf = n as f64;
    let terms = n + 2;
    let target = hyp_series(HypKind::Kummer { p: 1.0 - nf, r: gamma + 2.0 }, -x, terms)?
        / hyp_series(HypKind::Kummer { p: -nf, r: gamma + 1.0 }, -x, terms)?;
    let cmp = PrefactorComparison::new(
        lr.mixed_cf_value.unwrap_or(f64::NAN),
        lr.mixed_param_prefactor.unwrap_or(f64::NAN),
        top / bottom,
    );
    Ok((cmp, target))
}

/// Jacobi ratio: kernel at `1` of degree `n-1` for `(gamma, delta)` over kernel at `1`
/// of degree `n` for `(gamma, delta - 1)`, against `C(n, gamma, delta) * cf_value`.
pub fn jacobi_comparison(gamma: f64, delta: f64, n: usize, x: f64, depth: usize) -> Result<PrefactorComparison> {
    let jr = jacobi_ratio_cf(gamma, delta, n, x, depth)?;
    let top = kernel_at(&FamilySpec::jacobi(gamma, delta)?, 1.0, n - 1, x)?;
    let bottom = kernel_at(&FamilySpec::jacobi(gamma, delta - 1.0)?, 1.0, n, x)?;
    Ok(PrefactorComparison::new(jr.cf_value, jr.prefactor, top / bottom))
}

/// Chain sequence `l_j = (1 - g_{j-1}) g_j`, `j = 1..=n`, of the Gauss fraction.
pub fn gauss_chain_sequence(p: f64, q: f64, r: f64, n: usize) -> Vec<f64> {
    (1..=n).map(|j| (1.0 - gauss_g(p, q, r, j - 1)) * gauss_g(p, q, r, j)).collect()
}
