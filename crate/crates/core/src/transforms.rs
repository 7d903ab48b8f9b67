//! Geronimus and Uvarov transformations and the four recovery constructions
//! that rebuild the original polynomials from quasi-type kernel combinations.

use crate::error::{OpxError, Result};
use crate::families::{FamilySpec, Recurrence, Support};
use crate::kernels::{IteratedKernelContext, KernelContext};
use crate::moments::{gauss_rule, GaussRule};
use crate::scalar::Scalar;

/// Cap on Gauss nodes for the quadrature route to the Geronimus integrals.
pub const QUAD_NODE_CAP: usize = 1 << 12;

/// Relative agreement required between successive quadrature orders.
pub const QUAD_TOL: f64 = 1e-11;

const CF_DEPTH_CAP: usize = 1 << 22;

fn check_outside(support: Support, k: f64) -> Result<()> {
    if support.contains(k) {
        Err(OpxError::ShiftInsideSupport { shift: k })
    } else {
        Ok(())
    }
}

/// Ratios `t_n = F_n / F_{n-1}` of `F_n = int P_n(x) / (k - x) dmu`, for
/// `n = 1..=n_max`, as the minimal solution of the recurrence satisfied by
/// `F_n`, plus `F_0`. Evaluated by a backward continued fraction whose
/// starting depth is doubled until two passes agree to roundoff.
pub fn geronimus_minimal_ratios(family: &FamilySpec, k: f64, n_max: usize) -> Result<(Vec<f64>, f64)> {
    check_outside(family.support(), k)?;
    let pass = |depth: usize| -> (Vec<f64>, f64) {
        let rec = family.recurrence::<f64>(depth + 1);
        let mut t = vec![0.0; depth + 1];
        let mut next = 0.0;
        for j in (1..=depth).rev() {
            next = rec.lambda(j + 1) / (k - rec.c(j + 1) - next);
            t[j] = next;
        }
        let f0 = rec.mu0() / (k - rec.c(1) - t[1]);
        t.truncate(n_max + 1);
        (t, f0)
    };
    let mut depth = (2 * n_max + 32).max(64);
    let (mut prev, mut prev_f0) = pass(depth);
    loop {
        depth *= 2;
        let (cur, f0) = pass(depth);
        let agree = cur
            .iter()
            .zip(&prev)
            .skip(1)
            .all(|(a, b)| (a - b).abs() <= 8.0 * f64::EPSILON * a.abs())
            && (f0 - prev_f0).abs() <= 8.0 * f64::EPSILON * f0.abs();
        if agree {
            return Ok((cur, f0));
        }
        if depth >= CF_DEPTH_CAP {
            return Err(OpxError::NonConvergent(format!(
                "Geronimus ratios at k = {k} did not settle by depth {depth}"
            )));
        }
        prev = cur;
        prev_f0 = f0;
    }
}

/// `F_n = int P_n(x) / (k - x) dmu` for `n = 0..=n_max` by node-doubling Gauss
/// quadrature, together with the final node count.
pub fn geronimus_integrals_quadrature(
    family: &FamilySpec,
    k: f64,
    n_max: usize,
) -> Result<(Vec<f64>, usize)> {
    check_outside(family.support(), k)?;
    let rec = family.recurrence::<f64>(n_max.max(1));
    let integrals = |rule: &GaussRule| -> (Vec<f64>, Vec<f64>) {
        let mut f = vec![0.0; n_max + 1];
        let mut a = vec![0.0; n_max + 1];
        for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
            let p = rec.eval(n_max, x);
            let d = k - x;
            for j in 0..=n_max {
                f[j] += w * p[j] / d;
                a[j] += (w * p[j] / d).abs();
            }
        }
        (f, a)
    };
    let mut m = (n_max + 8).next_power_of_two().max(16);
    let (mut prev, _) = integrals(&gauss_rule(family, m)?);
    loop {
        let next_m = 2 * m;
        if next_m > QUAD_NODE_CAP {
            return Err(OpxError::NonConvergent(format!(
                "Geronimus integrals at k = {k} unsettled at {m} nodes"
            )));
        }
        let (cur, abs) = integrals(&gauss_rule(family, next_m)?);
        let ok = cur.iter().zip(&prev).zip(&abs).all(|((c, p), a)| {
            (c - p).abs() <= QUAD_TOL * c.abs() + 64.0 * f64::EPSILON * a
        });
        m = next_m;
        if ok {
            return Ok((cur, m));
        }
        prev = cur;
    }
}

/// Geronimus transformation data at a real shift outside the support.
#[derive(Debug, Clone)]
pub struct GeronimusData {
    pub k: f64,
    /// `A_n`, index `n = 0..=n_max` with `A_0 = 0`.
    pub a: Vec<f64>,
    /// The `L~(1)` value used for verification.
    pub mass0: f64,
    /// `F_0 = int dmu / (k - x)`.
    pub f0: f64,
    rec: Recurrence<f64>,
}

impl GeronimusData {
    /// Builds `A_1..A_{n_max}` at `k` with the given `mass0`.
    pub fn new(family: &FamilySpec, k: f64, n_max: usize, mass0: f64) -> Result<Self> {
        let (t, f0) = geronimus_minimal_ratios(family, k, n_max)?;
        let mut a: Vec<f64> = t.iter().map(|v| -v).collect();
        a[0] = 0.0;
        for (n, v) in a.iter().enumerate().skip(1) {
            if *v == 0.0 || !v.is_finite() {
                return Err(OpxError::DegenerateDenominator(format!("A_{n} = {v}")));
            }
        }
        Ok(GeronimusData { k, a, mass0, f0, rec: family.recurrence::<f64>(n_max + 2) })
    }

    /// Same as [`GeronimusData::new`] with the value of `L~(1)` that makes the
    /// transformed sequence orthogonal.
    pub fn canonical(family: &FamilySpec, k: f64, n_max: usize) -> Result<Self> {
        let mut g = Self::new(family, k, n_max, 1.0)?;
        g.mass0 = g.canonical_mass0();
        Ok(g)
    }

    /// `int dmu / (x - k)`.
    pub fn canonical_mass0(&self) -> f64 {
        -self.f0
    }

    pub fn n_max(&self) -> usize {
        self.a.len() - 1
    }

    /// `P~_n(k; x) = P_n(x) + A_n P_{n-1}(x)`.
    pub fn poly(&self, n: usize, x: f64) -> f64 {
        assert!(n <= self.n_max());
        if n == 0 {
            return 1.0;
        }
        let p = self.rec.eval(n, x);
        p[n] + self.a[n] * p[n - 1]
    }

    /// `P_n(x)` rebuilt from `P~_{n+1}` and `P~_n`, for `n >= 1`.
    pub fn op_from_geronimus(&self, n: usize, x: f64) -> Result<f64> {
        self.check_inverse(n, x)?;
        Ok(self.numerator(n, x) / (x - self.k))
    }

    /// The same quotient with the opposite sign on the `P~_n` term, as printed.
    pub fn op_from_geronimus_printed(&self, n: usize, x: f64) -> Result<f64> {
        self.check_inverse(n, x)?;
        Ok(self.numerator_printed(n, x) / (x - self.k))
    }

    fn check_inverse(&self, n: usize, x: f64) -> Result<()> {
        if n == 0 || n + 1 > self.n_max() {
            return Err(OpxError::InvalidInput(format!(
                "degree {n} outside 1..{}",
                self.n_max()
            )));
        }
        if (x - self.k).abs() <= 1e-12 * (1.0 + self.k.abs()) {
            return Err(OpxError::EvalAtShift);
        }
        Ok(())
    }

    /// `P~_{n+1}(x) + (lambda_{n+1} / A_n) P~_n(x)`, which vanishes at `x = k`.
    ///
    /// Eliminating `P_{n-1}` between `P~_{n+1}`, `P~_n` and the recurrence forces
    /// the plus sign; the coefficient of `P_n` is then `x - c_{n+1} + A_{n+1} + lambda_{n+1} / A_n = x - k`.
    pub fn numerator(&self, n: usize, x: f64) -> f64 {
        self.poly(n + 1, x) + self.rec.lambda(n + 1) / self.a[n] * self.poly(n, x)
    }

    /// `P~_{n+1}(x) - (lambda_{n+1} / A_n) P~_n(x)`.
    pub fn numerator_printed(&self, n: usize, x: f64) -> f64 {
        self.poly(n + 1, x) - self.rec.lambda(n + 1) / self.a[n] * self.poly(n, x)
    }

    /// Recurrence coefficients of the transformed sequence for `n = 1..=n_max`,
    /// with `lambda~_1 = mass0`.
    pub fn transformed_recurrence(&self) -> Result<Recurrence<f64>> {
        let top = self.n_max();
        if top < 2 {
            return Err(OpxError::InvalidInput("need n_max >= 2".into()));
        }
        let (a, r) = (&self.a, &self.rec);
        let c: Vec<f64> = (0..top).map(|n| r.c(n + 1) + a[n] - a[n + 1]).collect();
        let l: Vec<f64> = (0..top)
            .map(|n| match n {
                0 => self.mass0,
                1 => r.lambda(2) + a[1] * (r.c(1) - c[1]),
                _ => r.lambda(n) * a[n] / a[n - 1],
            })
            .collect();
        Recurrence::new(c, l)
    }
}

/// Uvarov transformation `L + r0 delta(x - k)`.
#[derive(Debug, Clone)]
pub struct UvarovData<T: Scalar> {
    pub k: T,
    pub r0: f64,
    /// `T_n`, index `0..=n_max`, `T_0 = 0`.
    pub t: Vec<T>,
    /// The printed closed form, kept for reporting.
    pub t_printed: Vec<T>,
    ctx: KernelContext<T>,
}

impl<T: Scalar> UvarovData<T> {
    pub fn new(family: &FamilySpec, k: T, r0: f64, n_max: usize) -> Result<Self> {
        if r0 == 0.0 || !r0.is_finite() {
            return Err(OpxError::ParameterOutOfRange(format!("Uvarov mass must be nonzero, got {r0}")));
        }
        let ctx = KernelContext::from_family(family, k, n_max)?;
        let rr = T::real(r0);
        let mut t = vec![T::zero()];
        let mut tp = vec![T::zero()];
        for n in 1..=n_max {
            let s = ctx.cd_partials[n - 1];
            let den = T::one() + rr * s;
            if den.modulus() <= 1e-14 * (1.0 + (rr * s).modulus()) {
                return Err(OpxError::DegenerateDenominator(format!("Uvarov denominator at n = {n}")));
            }
            t.push(rr * ctx.rho(n - 1) * ctx.ratio(n) / den);
            let lam = ctx.recurrence().lambda(n + 1);
            tp.push(rr * ctx.rho(n) / (T::one() + rr * s * ctx.ratio(n) / lam));
        }
        Ok(UvarovData { k, r0, t, t_printed: tp, ctx })
    }

    pub fn n_max(&self) -> usize {
        self.t.len() - 1
    }

    pub fn context(&self) -> &KernelContext<T> {
        &self.ctx
    }

    /// `P^_n(x) = P_n(x) - T_n P*_{n-1}(k; x)`.
    pub fn poly(&self, n: usize, x: T) -> T {
        assert!(n <= self.n_max());
        if n == 0 {
            return T::one();
        }
        let p = self.ctx.recurrence().eval(n, x);
        p[n] - self.t[n] * self.ctx.kernel_poly(n - 1, x)
    }

    /// Same construction with the printed `T_n`.
    pub fn poly_printed(&self, n: usize, x: T) -> T {
        if n == 0 {
            return T::one();
        }
        let p = self.ctx.recurrence().eval(n, x);
        p[n] - self.t_printed[n] * self.ctx.kernel_poly(n - 1, x)
    }
}

/// Which recovery theorem produced a coefficient set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RecoveryKind {
    Christoffel,
    Geronimus,
    Uvarov,
    Order2,
}

/// Coefficient sequences indexed by their subscript. Unused kinds are empty.
#[derive(Debug, Clone, PartialEq)]
pub struct RecoveryCoefficients<T> {
    pub kind: RecoveryKind,
    pub gamma: Vec<T>,
    pub eta: Vec<T>,
    pub alpha: Vec<T>,
    pub beta: Vec<T>,
    /// The printed variant of `beta` where it differs (order two only).
    pub beta_printed: Vec<T>,
}

impl<T: Scalar> RecoveryCoefficients<T> {
    fn empty(kind: RecoveryKind) -> Self {
        RecoveryCoefficients {
            kind,
            gamma: Vec::new(),
            eta: Vec::new(),
            alpha: Vec::new(),
            beta: Vec::new(),
            beta_printed: Vec::new(),
        }
    }
}

/// A construction `Q_n` meant to coincide with `P_n`.
pub trait Recovery<T: Scalar> {
    /// Highest degree available.
    fn n_max(&self) -> usize;
    /// `Q_n(x)` for `1 <= n <= n_max`.
    fn q(&self, n: usize, x: T) -> Result<T>;
    /// The reference `P_n(x)`.
    fn p(&self, n: usize, x: T) -> T;
    fn coefficients(&self) -> &RecoveryCoefficients<T>;
    fn coefficients_mut(&mut self) -> &mut RecoveryCoefficients<T>;
}

/// Largest `|Q_n(x) - P_n(x)| / max(1, |P_n(x)|)` over the sample points and `1 <= n <= n_max`.
pub fn max_recovery_deviation<T: Scalar, R: Recovery<T> + ?Sized>(rec: &R, xs: &[T]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for n in 1..=rec.n_max() {
        for &x in xs {
            let q = rec.q(n, x)?;
            let p = rec.p(n, x);
            let d = (q - p).modulus() / p.modulus().max(1.0);
            worst = worst.max(if d.is_nan() { f64::INFINITY } else { d });
        }
    }
    Ok(worst)
}

fn pole_guard<T: Scalar>(den: T, n: usize, x: T) -> Result<()> {
    if den.modulus() <= 1e-13 * (1.0 + x.modulus()) {
        Err(OpxError::PoleAtSample { degree: n, x: x.re() })
    } else {
        Ok(())
    }
}

fn take_coeffs<T: Scalar>(v: &[T], n_max: usize, name: &str) -> Result<()> {
    if v.len() < n_max {
        return Err(OpxError::InvalidInput(format!(
            "{name} needs {n_max} entries, got {}",
            v.len()
        )));
    }
    Ok(())
}

/// Recovery from a kernel polynomial at `k2` and an order-one quasi-type kernel at `k1`.
#[derive(Debug, Clone)]
pub struct ChristoffelRecovery<T: Scalar> {
    ctx1: KernelContext<T>,
    ctx2: KernelContext<T>,
    b: Vec<T>,
    n_max: usize,
    pub coeffs: RecoveryCoefficients<T>,
}

/// Computes `gamma_{n-1}, eta_{n-1}` for `n = 1..=n_max`; `b[n-1]` holds `B_n`.
pub fn recover_christoffel<T: Scalar>(
    family: &FamilySpec,
    k1: T,
    k2: T,
    b: &[T],
    n_max: usize,
) -> Result<ChristoffelRecovery<T>> {
    take_coeffs(b, n_max, "B")?;
    let ctx1 = KernelContext::from_family(family, k1, n_max)?;
    let ctx2 = KernelContext::from_family(family, k2, n_max)?;
    let rec = ctx1.recurrence();
    let mut co = RecoveryCoefficients::empty(RecoveryKind::Christoffel);
    for n in 1..=n_max {
        let bn = b[n - 1];
        let eta = -(rec.lambda(n + 1) + bn * ctx1.ratio(n)) / ctx2.ratio(n);
        let gamma = rec.c(n + 1) + ctx1.ratio(n + 1) - bn - eta;
        co.eta.push(eta);
        co.gamma.push(gamma);
    }
    Ok(ChristoffelRecovery { ctx1, ctx2, b: b[..n_max].to_vec(), n_max, coeffs: co })
}

impl<T: Scalar> ChristoffelRecovery<T> {
    /// `T*_n(k1; x) = P*_n(k1; x) + B_n P*_{n-1}(k1; x)`.
    pub fn quasi_at_k1(&self, n: usize, x: T) -> T {
        self.ctx1.kernel_poly(n, x) + self.b[n - 1] * self.ctx1.kernel_poly(n - 1, x)
    }

    /// `B~_n = B_n + eta_{n-1}`, the coefficient of the coincident-shift form.
    pub fn btilde(&self, n: usize) -> T {
        self.b[n - 1] + self.coeffs.eta[n - 1]
    }
}

impl<T: Scalar> Recovery<T> for ChristoffelRecovery<T> {
    fn n_max(&self) -> usize {
        self.n_max
    }

    fn q(&self, n: usize, x: T) -> Result<T> {
        let gamma = self.coeffs.gamma[n - 1];
        let eta = self.coeffs.eta[n - 1];
        let den = x - gamma;
        pole_guard(den, n, x)?;
        let num = (x - self.ctx1.k()) * self.quasi_at_k1(n, x)
            + eta * (x - self.ctx2.k()) * self.ctx2.kernel_poly(n - 1, x);
        Ok(num / den)
    }

    fn p(&self, n: usize, x: T) -> T {
        self.ctx1.recurrence().eval(n, x)[n]
    }

    fn coefficients(&self) -> &RecoveryCoefficients<T> {
        &self.coeffs
    }

    fn coefficients_mut(&mut self) -> &mut RecoveryCoefficients<T> {
        &mut self.coeffs
    }
}

/// Recovery from a Geronimus polynomial at `k1` and a quasi-type kernel at `k2`.
#[derive(Debug, Clone)]
pub struct GeronimusRecovery {
    pub geronimus: GeronimusData,
    ctx2: KernelContext<f64>,
    btilde: Vec<f64>,
    n_max: usize,
    pub coeffs: RecoveryCoefficients<f64>,
}

/// Computes `alpha_n, gamma_n, eta_n` for `n = 1..=n_max`; `btilde[n-1]` holds `B~_n`.
pub fn recover_geronimus(
    family: &FamilySpec,
    k1: f64,
    k2: f64,
    btilde: &[f64],
    n_max: usize,
) -> Result<GeronimusRecovery> {
    take_coeffs(btilde, n_max, "B~")?;
    let ger = GeronimusData::canonical(family, k1, n_max + 1)?;
    let ctx2 = KernelContext::from_family(family, k2, n_max)?;
    let rec = ctx2.recurrence();
    let mut co = RecoveryCoefficients::empty(RecoveryKind::Geronimus);
    for v in [&mut co.alpha, &mut co.gamma, &mut co.eta] {
        v.push(f64::NAN);
    }
    for n in 1..=n_max {
        let bt = btilde[n - 1];
        let lam = rec.lambda(n + 1);
        let den = lam + bt * ctx2.ratio(n);
        if den.abs() <= 1e-14 * (lam.abs() + (bt * ctx2.ratio(n)).abs()) {
            return Err(OpxError::DegenerateDenominator(format!("Geronimus recovery at n = {n}")));
        }
        let eta = -lam / den;
        let alpha = 1.0 + eta;
        let gamma = rec.c(n + 1) * alpha - ger.a[n + 1] + eta * ctx2.ratio(n + 1) - eta * bt;
        co.eta.push(eta);
        co.alpha.push(alpha);
        co.gamma.push(gamma);
    }
    Ok(GeronimusRecovery { geronimus: ger, ctx2, btilde: btilde[..n_max].to_vec(), n_max, coeffs: co })
}

impl GeronimusRecovery {
    /// `T*_n(k2; x) = P*_n(k2; x) + B~_n P*_{n-1}(k2; x)`.
    pub fn quasi_at_k2(&self, n: usize, x: f64) -> f64 {
        self.ctx2.kernel_poly(n, x) + self.btilde[n - 1] * self.ctx2.kernel_poly(n - 1, x)
    }
}

impl Recovery<f64> for GeronimusRecovery {
    fn n_max(&self) -> usize {
        self.n_max
    }

    fn q(&self, n: usize, x: f64) -> Result<f64> {
        let co = &self.coeffs;
        let den = co.alpha[n] * x - co.gamma[n];
        pole_guard(den, n, x)?;
        let num = self.geronimus.poly(n + 1, x) + co.eta[n] * (x - self.ctx2.k()) * self.quasi_at_k2(n, x);
        Ok(num / den)
    }

    fn p(&self, n: usize, x: f64) -> f64 {
        self.ctx2.recurrence().eval(n, x)[n]
    }

    fn coefficients(&self) -> &RecoveryCoefficients<f64> {
        &self.coeffs
    }

    fn coefficients_mut(&mut self) -> &mut RecoveryCoefficients<f64> {
        &mut self.coeffs
    }
}

/// Recovery from an Uvarov polynomial at `k1` and a quasi-type kernel at `k2`.
#[derive(Debug, Clone)]
pub struct UvarovRecovery<T: Scalar> {
    pub uvarov: UvarovData<T>,
    ctx2: KernelContext<T>,
    btilde: Vec<T>,
    n_max: usize,
    pub coeffs: RecoveryCoefficients<T>,
}

/// Computes `alpha_n, beta_n, eta_n` for `n = 1..=n_max`; `gamma` mirrors `beta`.
pub fn recover_uvarov<T: Scalar>(
    family: &FamilySpec,
    k1: T,
    k2: T,
    r0: f64,
    btilde: &[T],
    n_max: usize,
) -> Result<UvarovRecovery<T>> {
    take_coeffs(btilde, n_max, "B~")?;
    let uv = UvarovData::new(family, k1, r0, n_max)?;
    let ctx2 = KernelContext::from_family(family, k2, n_max)?;
    let rec = ctx2.recurrence();
    let ctx1 = uv.context();
    let mut co = RecoveryCoefficients::empty(RecoveryKind::Uvarov);
    for v in [&mut co.alpha, &mut co.beta, &mut co.eta] {
        v.push(T::real(f64::NAN));
    }
    for n in 1..=n_max {
        let bt = btilde[n - 1];
        let lam = rec.lambda(n + 1);
        let den = bt * ctx2.ratio(n) + lam;
        if den.modulus() <= 1e-14 * (lam.modulus() + (bt * ctx2.ratio(n)).modulus()) {
            return Err(OpxError::DegenerateDenominator(format!("Uvarov recovery at n = {n}")));
        }
        let tn = uv.t[n];
        let eta = tn * ctx1.ratio(n) / den;
        let alpha = T::one() + eta;
        let beta = k1 + tn + eta * (rec.c(n + 1) - bt + ctx2.ratio(n + 1));
        co.eta.push(eta);
        co.alpha.push(alpha);
        co.beta.push(beta);
    }
    co.gamma = co.beta.clone();
    Ok(UvarovRecovery { uvarov: uv, ctx2, btilde: btilde[..n_max].to_vec(), n_max, coeffs: co })
}

impl<T: Scalar> UvarovRecovery<T> {
    pub fn quasi_at_k2(&self, n: usize, x: T) -> T {
        self.ctx2.kernel_poly(n, x) + self.btilde[n - 1] * self.ctx2.kernel_poly(n - 1, x)
    }
}

impl<T: Scalar> Recovery<T> for UvarovRecovery<T> {
    fn n_max(&self) -> usize {
        self.n_max
    }

    fn q(&self, n: usize, x: T) -> Result<T> {
        let co = &self.coeffs;
        let den = co.alpha[n] * x - co.beta[n];
        pole_guard(den, n, x)?;
        let num = (x - self.uvarov.k) * self.uvarov.poly(n, x)
            + co.eta[n] * (x - self.ctx2.k()) * self.quasi_at_k2(n, x);
        Ok(num / den)
    }

    fn p(&self, n: usize, x: T) -> T {
        self.ctx2.recurrence().eval(n, x)[n]
    }

    fn coefficients(&self) -> &RecoveryCoefficients<T> {
        &self.coeffs
    }

    fn coefficients_mut(&mut self) -> &mut RecoveryCoefficients<T> {
        &mut self.coeffs
    }
}

/// Right-hand side of the order-two coefficient constraint:
/// `r_{n+2}(k1) - r_{n+2}(k2) - P*_{n+1}(k2; k3) / P*_n(k2; k3)`.
fn order2_rhs<T: Scalar>(ctx1: &KernelContext<T>, ictx: &IteratedKernelContext<T>, n: usize) -> T {
    ctx1.ratio(n + 2) - ictx.base.ratio(n + 2) - ictx.star_ratio(n)
}

/// Solves the order-two constraint for `L~_n` given `M~_n`, `n = 1..=n_max`.
pub fn solve_order2_ltilde<T: Scalar>(
    family: &FamilySpec,
    k1: T,
    k2: T,
    k3: T,
    mtilde: &[T],
    n_max: usize,
) -> Result<Vec<T>> {
    take_coeffs(mtilde, n_max, "M~")?;
    let ctx1 = KernelContext::from_family(family, k1, n_max + 1)?;
    let ictx = IteratedKernelContext::from_family(family, k2, k3, n_max)?;
    let rec = ctx1.recurrence();
    Ok((1..=n_max)
        .map(|n| order2_rhs(&ctx1, &ictx, n) - mtilde[n - 1] * ctx1.ratio(n) / rec.lambda(n + 1))
        .collect())
}

/// Recovery from iterated kernels at `(k2, k3)` and an order-two quasi-type kernel at `k1`.
#[derive(Debug, Clone)]
pub struct Order2Recovery<T: Scalar> {
    ctx1: KernelContext<T>,
    pub iterated: IteratedKernelContext<T>,
    ltilde: Vec<T>,
    mtilde: Vec<T>,
    n_max: usize,
    pub coeffs: RecoveryCoefficients<T>,
}

/// Computes `alpha_n, beta_n` for `n = 1..=n_max` after checking the constraint.
pub fn recover_order2<T: Scalar>(
    family: &FamilySpec,
    k1: T,
    k2: T,
    k3: T,
    ltilde: &[T],
    mtilde: &[T],
    n_max: usize,
) -> Result<Order2Recovery<T>> {
    take_coeffs(ltilde, n_max, "L~")?;
    take_coeffs(mtilde, n_max, "M~")?;
    let ctx1 = KernelContext::from_family(family, k1, n_max + 1)?;
    let ictx = IteratedKernelContext::from_family(family, k2, k3, n_max)?;
    let rec = ctx1.recurrence().clone();
    let mut co = RecoveryCoefficients::empty(RecoveryKind::Order2);
    for v in [&mut co.alpha, &mut co.beta, &mut co.beta_printed] {
        v.push(T::real(f64::NAN));
    }
    for n in 1..=n_max {
        let (l, m) = (ltilde[n - 1], mtilde[n - 1]);
        let lam = rec.lambda(n + 1);
        let rhs = order2_rhs(&ctx1, &ictx, n);
        let lhs = l + m * ctx1.ratio(n) / lam;
        let residual = (lhs - rhs).modulus();
        let scale = lhs.modulus().max(rhs.modulus()).max(1.0);
        if residual > 1e-10 * scale {
            return Err(OpxError::ConstraintViolated { degree: n, residual });
        }
        let alpha = -m * ctx1.ratio(n) / lam;
        let cross = rec.lambda(n + 2) * ictx.cross_ratio(n);
        let beta = l * ctx1.ratio(n + 1) - m + alpha * rec.c(n + 1) + cross;
        let printed = l * ctx1.ratio(n + 1) - m - ctx1.ratio(n) / lam * rec.c(n + 1) + cross;
        co.alpha.push(alpha);
        co.beta.push(beta);
        co.beta_printed.push(printed);
    }
    Ok(Order2Recovery {
        ctx1,
        iterated: ictx,
        ltilde: ltilde[..n_max].to_vec(),
        mtilde: mtilde[..n_max].to_vec(),
        n_max,
        coeffs: co,
    })
}

impl<T: Scalar> Order2Recovery<T> {
    /// `S*_{n+1}(k1; x) = P*_{n+1} + L~_n P*_n + M~_n P*_{n-1}` at `k1`.
    pub fn quasi_at_k1(&self, n: usize, x: T) -> T {
        self.ctx1.kernel_poly(n + 1, x)
            + self.ltilde[n - 1] * self.ctx1.kernel_poly(n, x)
            + self.mtilde[n - 1] * self.ctx1.kernel_poly(n - 1, x)
    }

    /// The recovery quotient evaluated with the printed `beta`.
    pub fn q_printed(&self, n: usize, x: T) -> T {
        self.quotient(n, x, self.coeffs.beta_printed[n])
    }

    fn quotient(&self, n: usize, x: T, beta: T) -> T {
        let k2 = self.iterated.base.k();
        let k3 = self.iterated.k3();
        let num = (x - self.ctx1.k()) * self.quasi_at_k1(n, x)
            - (x - k2) * (x - k3) * self.iterated.iterated_kernel(n, x);
        num / (self.coeffs.alpha[n] * x - beta)
    }
}

impl<T: Scalar> Recovery<T> for Order2Recovery<T> {
    fn n_max(&self) -> usize {
        self.n_max
    }

    fn q(&self, n: usize, x: T) -> Result<T> {
        let den = self.coeffs.alpha[n] * x - self.coeffs.beta[n];
        pole_guard(den, n, x)?;
        Ok(self.quotient(n, x, self.coeffs.beta[n]))
    }

    fn p(&self, n: usize, x: T) -> T {
        self.ctx1.recurrence().eval(n, x)[n]
    }

    fn coefficients(&self) -> &RecoveryCoefficients<T> {
        &self.coeffs
    }

    fn coefficients_mut(&mut self) -> &mut RecoveryCoefficients<T> {
        &mut self.coeffs
    }
}

/// `L^1(dmu)` norm of `(x - gamma) P_{n}(x) / (x - k)` and the Hölder-type
/// bound built from `int |x - k|^{-2} dmu` and the `L^2` norms of `x P_n`, `P_n`.
///
/// Uses a fixed high-order Gauss rule; intended for compact supports with `k`
/// outside.
pub fn coincident_l1_bound(family: &FamilySpec, k: f64, gamma: f64, n: usize) -> Result<(f64, f64)> {
    check_outside(family.support(), k)?;
    let rule = gauss_rule(family, 512.max(4 * n))?;
    let rec = family.recurrence::<f64>(n.max(1));
    let mut l1 = 0.0;
    let mut inv2 = 0.0;
    let mut xp2 = 0.0;
    let mut p2 = 0.0;
    for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
        let p = rec.eval(n, x)[n];
        l1 += w * ((x - gamma) * p / (x - k)).abs();
        inv2 += w / (x - k).powi(2);
        xp2 += w * (x * p).powi(2);
        p2 += w * p * p;
    }
    let bound = inv2.sqrt() * (xp2.sqrt() + gamma.abs() * p2.sqrt());
    Ok((l1, bound))
}
