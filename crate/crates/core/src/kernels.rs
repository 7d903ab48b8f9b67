//! Kernel (Christoffel-transformed) polynomials, their recurrence, the
//! Christoffel-Darboux kernel, and iterated kernels.

use num_complex::Complex64;

use crate::error::{OpxError, Result};
use crate::families::{FamilySpec, Recurrence};
use crate::moments::gauss_rule;
use crate::scalar::Scalar;

/// Relative threshold below which `P_j(k)` is treated as zero.
pub const ZERO_THRESHOLD: f64 = 1e-13;

/// Switch radius factor: `|x - k| < SWITCH * (1 + |k|)` uses the summed form.
pub const SWITCH: f64 = 1e-4;

/// A recurrence plus a shift `k`, with cached values at `k`.
///
/// Valid degrees are `0..=n_max`; values at `k` are cached up to `n_max + 1`.
#[derive(Debug, Clone)]
pub struct KernelContext<T: Scalar> {
    rec: Recurrence<T>,
    k: T,
    n_max: usize,
    /// `P_j(k)`, `j = 0..=n_max+1`.
    pub pk: Vec<T>,
    /// `h_j = lambda_1 ... lambda_{j+1}`, `j = 0..=n_max+1`. May underflow for large degrees.
    pub norms: Vec<T>,
    /// `r_j = P_j(k) / P_{j-1}(k)`, index 0 unused.
    ratio: Vec<T>,
    /// `P_j(k)^2 / h_j`, computed without forming `h_j`.
    rho: Vec<T>,
    /// Partial sums `S_n = sum_{j<=n} rho_j`.
    pub cd_partials: Vec<T>,
}

impl<T: Scalar> KernelContext<T> {
    /// Builds the context from a recurrence table with at least `n_max + 2` pairs.
    pub fn new(rec: Recurrence<T>, k: T, n_max: usize) -> Result<Self> {
        let top = n_max + 1;
        if rec.len() < top + 1 {
            return Err(OpxError::CoefficientsUnavailable(rec.len()));
        }
        let pk = rec.eval(top, k);
        for j in 1..=n_max {
            let scale = (k - rec.c(j)).modulus() * pk[j - 1].modulus()
                + if j >= 2 { rec.lambda(j).modulus() * pk[j - 2].modulus() } else { 0.0 };
            if pk[j].modulus() <= ZERO_THRESHOLD * scale || !pk[j].finite() {
                return Err(OpxError::KernelUndefined { degree: j });
            }
        }
        let mut ratio = vec![T::zero(); top + 1];
        let mut rho = Vec::with_capacity(top + 1);
        let mut sums = Vec::with_capacity(top + 1);
        ratio[1] = pk[1];
        // Ratios follow their own recurrence so that large degrees never overflow.
        for j in 1..top {
            ratio[j + 1] = (k - rec.c(j + 1)) - rec.lambda(j + 1) / ratio[j];
        }
        let mut acc = T::zero();
        for j in 0..=top {
            let r = if j == 0 {
                T::one() / rec.lambda(1)
            } else {
                rho[j - 1] * ratio[j] * ratio[j] / rec.lambda(j + 1)
            };
            rho.push(r);
            acc = acc + r;
            sums.push(acc);
        }
        let norms = rec.norms(top);
        Ok(KernelContext { rec, k, n_max, pk, norms, ratio, rho, cd_partials: sums })
    }

    /// Context for a family, sized for degrees `0..=n_max`.
    pub fn from_family(family: &FamilySpec, k: T, n_max: usize) -> Result<Self> {
        Self::new(family.recurrence::<T>(n_max + 3), k, n_max)
    }

    pub fn k(&self) -> T {
        self.k
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn recurrence(&self) -> &Recurrence<T> {
        &self.rec
    }

    /// `P_j(k) / P_{j-1}(k)` for `1 <= j <= n_max + 1`.
    pub fn ratio(&self, j: usize) -> T {
        assert!(j >= 1 && j <= self.n_max + 1);
        self.ratio[j]
    }

    /// `P_j(k)^2 / h_j`.
    pub fn rho(&self, j: usize) -> T {
        self.rho[j]
    }

    fn check_degree(&self, n: usize) {
        assert!(n <= self.n_max, "degree {n} beyond context limit {}", self.n_max);
    }

    /// Weights `w_j` of the summed form `P*_n = sum_j w_j P_j`.
    fn sum_weights(&self, n: usize) -> Vec<T> {
        let mut w = vec![T::zero(); n + 1];
        w[n] = T::one();
        for j in (1..=n).rev() {
            w[j - 1] = w[j] * self.rec.lambda(j + 1) / self.ratio[j];
        }
        w
    }

    /// `P*_n(k; x)` in summed form, singularity free.
    pub fn kernel_poly_sum(&self, n: usize, x: T) -> T {
        self.check_degree(n);
        let p = self.rec.eval(n, x);
        self.sum_weights(n).iter().zip(&p).fold(T::zero(), |a, (&w, &v)| a + w * v)
    }

    /// `P*_n(k; x)` as a divided difference.
    pub fn kernel_poly_divided(&self, n: usize, x: T) -> T {
        self.check_degree(n);
        let p = self.rec.eval(n + 1, x);
        (p[n + 1] - self.ratio[n + 1] * p[n]) / (x - self.k)
    }

    /// Whether `x` is close enough to `k` to require the summed form.
    pub fn near_shift(&self, x: T) -> bool {
        (x - self.k).modulus() < SWITCH * (1.0 + self.k.modulus())
    }

    /// Monic kernel polynomial `P*_n(k; x)`.
    pub fn kernel_poly(&self, n: usize, x: T) -> T {
        if self.near_shift(x) {
            self.kernel_poly_sum(n, x)
        } else {
            self.kernel_poly_divided(n, x)
        }
    }

    /// All of `P*_0..P*_n` at `x`.
    pub fn kernel_values(&self, n: usize, x: T) -> Vec<T> {
        self.check_degree(n);
        if self.near_shift(x) || n == 0 {
            return (0..=n).map(|j| self.kernel_poly_sum(j, x)).collect();
        }
        let p = self.rec.eval(n + 1, x);
        let d = x - self.k;
        (0..=n).map(|j| (p[j + 1] - self.ratio[j + 1] * p[j]) / d).collect()
    }

    /// Kernel recurrence coefficients `(c*_n, lambda*_n)` for `n = 1..=n_max`.
    pub fn kernel_recurrence(&self, n_max: usize) -> Result<Vec<(T, T)>> {
        if n_max > self.n_max {
            return Err(OpxError::CoefficientsUnavailable(self.n_max));
        }
        Ok((1..=n_max)
            .map(|n| {
                let c = self.rec.c(n + 1) - self.ratio[n] + self.ratio[n + 1];
                let l = if n == 1 {
                    self.rec.mu0() * (self.rec.c(1) - self.k)
                } else {
                    self.rec.lambda(n) * self.ratio[n] / self.ratio[n - 1]
                };
                (c, l)
            })
            .collect())
    }

    /// Kernel recurrence as a table usable for further transformations.
    pub fn kernel_table(&self, n_max: usize) -> Result<Recurrence<T>> {
        let (c, l) = self.kernel_recurrence(n_max)?.into_iter().unzip();
        Recurrence::new(c, l)
    }

    /// Christoffel-Darboux kernel `K_n(x, k)` in summed form.
    pub fn cd_kernel(&self, n: usize, x: T) -> T {
        self.check_degree(n);
        let p = self.rec.eval(n, x);
        (0..=n).fold(T::zero(), |a, j| a + p[j] * self.pk[j] / self.norms[j])
    }

    /// Closed two-term form of `K_n(x, k)`, for `x != k`.
    pub fn cd_kernel_closed(&self, n: usize, x: T) -> T {
        self.check_degree(n);
        let p = self.rec.eval(n + 1, x);
        (p[n + 1] * self.pk[n] - self.pk[n + 1] * p[n]) / ((x - self.k) * self.norms[n])
    }

    /// `P_{n+1}(x)` rebuilt from two consecutive kernel polynomials.
    pub fn op_from_kernels(&self, n: usize, x: T) -> T {
        assert!(n < self.n_max, "needs the context valid to degree n + 1");
        let coef = self.rec.lambda(n + 2) / self.ratio[n + 1];
        self.kernel_poly(n + 1, x) - coef * self.kernel_poly(n, x)
    }
}

/// Two successive Christoffel transformations at `k2` then `k3`.
#[derive(Debug, Clone)]
pub struct IteratedKernelContext<T: Scalar> {
    pub base: KernelContext<T>,
    second_shift: T,
    inner: KernelContext<T>,
    /// `sum_{j<=n} P_j(k3) P_j(k2) / h_j`, `n = 0..=n_max+1`.
    pub cd_cross: Vec<T>,
    /// `P*_n(k2; k3)`, `n = 0..=n_max+1`.
    pub star_values: Vec<T>,
}

impl<T: Scalar> IteratedKernelContext<T> {
    /// Iterated kernels of degree `0..=n_max` from a recurrence with at least
    /// `n_max + 5` pairs.
    pub fn new(rec: Recurrence<T>, k2: T, k3: T, n_max: usize) -> Result<Self> {
        let base = KernelContext::new(rec, k2, n_max + 2)?;
        let p3 = base.recurrence().eval(n_max + 1, k3);
        let mut cross = Vec::with_capacity(n_max + 2);
        let mut acc = T::zero();
        for j in 0..=n_max + 1 {
            acc = acc + p3[j] * base.pk[j] / base.norms[j];
            cross.push(acc);
        }
        let star: Vec<T> = (0..=n_max + 1).map(|j| base.kernel_poly(j, k3)).collect();
        for (j, v) in cross.iter().enumerate().take(n_max + 1) {
            if v.modulus() == 0.0 || !v.finite() {
                return Err(OpxError::IteratedUndefined { degree: j });
            }
        }
        let table = base.kernel_table(n_max + 2)?;
        let inner = KernelContext::new(table, k3, n_max).map_err(|e| match e {
            OpxError::KernelUndefined { degree } => OpxError::IteratedUndefined { degree },
            other => other,
        })?;
        Ok(IteratedKernelContext { base, second_shift: k3, inner, cd_cross: cross, star_values: star })
    }

    pub fn from_family(family: &FamilySpec, k2: T, k3: T, n_max: usize) -> Result<Self> {
        Self::new(family.recurrence::<T>(n_max + 5), k2, k3, n_max)
    }

    pub fn k3(&self) -> T {
        self.second_shift
    }

    pub fn n_max(&self) -> usize {
        self.inner.n_max()
    }

    /// Iterated kernel `P**_n(k2, k3; x)`.
    pub fn iterated_kernel(&self, n: usize, x: T) -> T {
        self.inner.kernel_poly(n, x)
    }

    /// Ratio `P*_{n+1}(k2; k3) / P*_n(k2; k3)` from the cached kernel values.
    pub fn star_ratio(&self, n: usize) -> T {
        self.star_values[n + 1] / self.star_values[n]
    }

    /// Ratio of consecutive cross sums, `cd_cross[n+1] / cd_cross[n]`.
    pub fn cross_ratio(&self, n: usize) -> T {
        self.cd_cross[n + 1] / self.cd_cross[n]
    }

    /// The context of the shifted family at `k3`.
    pub fn inner(&self) -> &KernelContext<T> {
        &self.inner
    }
}

/// Kernel polynomial at a possibly complex shift for a real family.
pub fn complex_context(family: &FamilySpec, k: Complex64, n_max: usize) -> Result<KernelContext<Complex64>> {
    KernelContext::from_family(family, k, n_max)
}

/// `sum_j P_j(x) P_j(u) / h_j` for `j = 0..=n`.
fn cd_sum(px: &[f64], pu: &[f64], h: &[f64], n: usize) -> f64 {
    (0..=n).map(|j| px[j] * pu[j] / h[j]).sum()
}

/// Double integral `int int (x-u)^2 K_n(x,u) K_m(x,u) dmu(u) dmu(x)` by
/// tensor-product Gauss quadrature of `quad_order` nodes per axis.
pub fn product_orthogonality_check(
    family: &FamilySpec,
    n: usize,
    m: usize,
    quad_order: usize,
) -> Result<f64> {
    if quad_order < n + m + 3 {
        return Err(OpxError::InvalidInput(format!(
            "quadrature order {quad_order} below n + m + 3 = {}",
            n + m + 3
        )));
    }
    let rule = gauss_rule(family, quad_order)?;
    let top = n.max(m);
    let rec = family.recurrence::<f64>(top + 1);
    let h = rec.norms(top);
    let vals: Vec<Vec<f64>> = rule.nodes.iter().map(|&x| rec.eval(top, x)).collect();
    let mut total = 0.0;
    for (i, &x) in rule.nodes.iter().enumerate() {
        let mut inner = 0.0;
        for (j, &u) in rule.nodes.iter().enumerate() {
            let kn = cd_sum(&vals[i], &vals[j], &h, n);
            let km = cd_sum(&vals[i], &vals[j], &h, m);
            inner += rule.weights[j] * (x - u).powi(2) * kn * km;
        }
        total += rule.weights[i] * inner;
    }
    Ok(total)
}

/// The diagonal value `2 lambda_{n+2}` expected for `n = m` in the monic convention.
pub fn product_diagonal_contract(family: &FamilySpec, n: usize) -> f64 {
    2.0 * family.coeff(n + 2).1
}
