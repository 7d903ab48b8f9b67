//! Moment functionals presented through their three-term recurrence, and
//! evaluation of the associated monic polynomial sequences.
//!
//! Conventions: `x P_n = P_{n+1} + c_{n+1} P_n + lambda_{n+1} P_{n-1}` with
//! `P_{-1} = 0`, `P_0 = 1`. The coefficient `lambda_1` is the total mass, so the
//! squared norm of `P_j` is the product `lambda_1 ... lambda_{j+1}`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use statrs::function::gamma::ln_gamma;

use crate::error::{OpxError, Result};
use crate::scalar::Scalar;

/// Which classical family (if any) a [`FamilySpec`] describes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FamilyKind {
    Chebyshev1,
    Laguerre { gamma: f64 },
    Jacobi { gamma: f64, delta: f64 },
    Custom,
}

/// Support of the orthogonality measure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Support {
    /// Compact interval `[a, b]`.
    Interval(f64, f64),
    /// Half line `[a, inf)`.
    HalfLine(f64),
    /// Whole real line.
    RealLine,
}

impl Support {
    /// Closed-support membership with a small relative slack.
    pub fn contains(&self, x: f64) -> bool {
        let slack = |v: f64| 1e-12 * (1.0 + v.abs());
        match *self {
            Support::Interval(a, b) => x >= a - slack(a) && x <= b + slack(b),
            Support::HalfLine(a) => x >= a - slack(a),
            Support::RealLine => true,
        }
    }

    /// Does the complex point `z` touch the (real) support?
    pub fn contains_point(&self, z: Complex64) -> bool {
        z.im.abs() <= 1e-14 * (1.0 + z.re.abs()) && self.contains(z.re)
    }
}

type Provider = Arc<dyn Fn(usize) -> (f64, f64) + Send + Sync>;

/// A moment functional given by recurrence coefficients plus support metadata.
#[derive(Clone)]
pub struct FamilySpec {
    kind: FamilyKind,
    support: Support,
    mu0: f64,
    provider: Option<Provider>,
}

impl fmt::Debug for FamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FamilySpec")
            .field("kind", &self.kind)
            .field("support", &self.support)
            .field("mu0", &self.mu0)
            .finish()
    }
}

impl FamilySpec {
    /// Monic Chebyshev polynomials of the first kind.
    pub fn chebyshev1() -> Self {
        FamilySpec {
            kind: FamilyKind::Chebyshev1,
            support: Support::Interval(-1.0, 1.0),
            mu0: PI,
            provider: None,
        }
    }

    /// Monic Laguerre polynomials for the weight `x^gamma e^{-x}` on `[0, inf)`.
    pub fn laguerre(gamma: f64) -> Result<Self> {
        if !(gamma > -1.0) || !gamma.is_finite() {
            return Err(OpxError::ParameterOutOfRange(format!(
                "Laguerre requires gamma > -1, got {gamma}"
            )));
        }
        Ok(FamilySpec {
            kind: FamilyKind::Laguerre { gamma },
            support: Support::HalfLine(0.0),
            mu0: ln_gamma(gamma + 1.0).exp(),
            provider: None,
        })
    }

    /// Monic Jacobi polynomials for the weight `(1-x)^gamma (1+x)^delta` on `[-1, 1]`.
    pub fn jacobi(gamma: f64, delta: f64) -> Result<Self> {
        if !(gamma > -1.0) || !(delta > -1.0) || !gamma.is_finite() || !delta.is_finite() {
            return Err(OpxError::ParameterOutOfRange(format!(
                "Jacobi requires gamma, delta > -1, got ({gamma}, {delta})"
            )));
        }
        let s = gamma + delta;
        let ln_mu0 = (s + 1.0) * std::f64::consts::LN_2 + ln_gamma(gamma + 1.0)
            + ln_gamma(delta + 1.0)
            - ln_gamma(s + 2.0);
        Ok(FamilySpec {
            kind: FamilyKind::Jacobi { gamma, delta },
            support: Support::Interval(-1.0, 1.0),
            mu0: ln_mu0.exp(),
            provider: None,
        })
    }

    /// Custom family from a coefficient provider `n -> (c_n, lambda_n)` for `n >= 1`.
    ///
    /// The provider's `lambda_1` is ignored; `mu0` takes its place.
    pub fn custom<F>(provider: F, support: Support, mu0: f64) -> Result<Self>
    where
        F: Fn(usize) -> (f64, f64) + Send + Sync + 'static,
    {
        if !(mu0 > 0.0) || !mu0.is_finite() {
            return Err(OpxError::ParameterOutOfRange(format!(
                "total mass must be positive, got {mu0}"
            )));
        }
        Ok(FamilySpec {
            kind: FamilyKind::Custom,
            support,
            mu0,
            provider: Some(Arc::new(provider)),
        })
    }

    /// Custom family from a finite table of `(c_n, lambda_n)`, `n = 1..=len`.
    ///
    /// `mu0` is read from the first row's lambda. Requests past the table
    /// yield NaN, which downstream checks surface as failures.
    pub fn from_table(rows: Vec<(f64, f64)>, support: Support) -> Result<Self> {
        let first = rows
            .first()
            .ok_or_else(|| OpxError::InvalidInput("empty coefficient table".into()))?;
        let mu0 = first.1;
        let rows = Arc::new(rows);
        Self::custom(
            move |n| rows.get(n - 1).copied().unwrap_or((f64::NAN, f64::NAN)),
            support,
            mu0,
        )
    }

    pub fn kind(&self) -> FamilyKind {
        self.kind
    }

    pub fn support(&self) -> Support {
        self.support
    }

    /// Total mass `L(1)`.
    pub fn mu0(&self) -> f64 {
        self.mu0
    }

    /// Short name used in reports.
    pub fn name(&self) -> String {
        match self.kind {
            FamilyKind::Chebyshev1 => "chebyshev1".into(),
            FamilyKind::Laguerre { gamma } => format!("laguerre(gamma={gamma})"),
            FamilyKind::Jacobi { gamma, delta } => format!("jacobi(gamma={gamma},delta={delta})"),
            FamilyKind::Custom => "custom".into(),
        }
    }

    /// Coefficients `(c_n, lambda_n)` for a single 1-based index.
    pub fn coeff(&self, n: usize) -> (f64, f64) {
        assert!(n >= 1, "recurrence indices start at 1");
        if n == 1 {
            let c1 = match self.kind {
                FamilyKind::Chebyshev1 => 0.0,
                FamilyKind::Laguerre { gamma } => gamma + 1.0,
                FamilyKind::Jacobi { gamma, delta } => (delta - gamma) / (gamma + delta + 2.0),
                FamilyKind::Custom => (self.provider.as_ref().unwrap())(1).0,
            };
            return (c1, self.mu0);
        }
        let m = (n - 1) as f64;
        match self.kind {
            FamilyKind::Chebyshev1 => (0.0, if n == 2 { 0.5 } else { 0.25 }),
            FamilyKind::Laguerre { gamma } => (2.0 * m + gamma + 1.0, m * (m + gamma)),
            FamilyKind::Jacobi { gamma: a, delta: b } => {
                let s = 2.0 * m + a + b;
                let c = (b * b - a * a) / (s * (s + 2.0));
                let lam = if n == 2 {
                    4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + a + b).powi(2) * (3.0 + a + b))
                } else {
                    4.0 * m * (m + a) * (m + b) * (m + a + b) / (s * s * (s + 1.0) * (s - 1.0))
                };
                (c, lam)
            }
            FamilyKind::Custom => (self.provider.as_ref().unwrap())(n),
        }
    }

    /// Recurrence table with `len` coefficient pairs, embedded in scalar type `T`.
    pub fn recurrence<T: Scalar>(&self, len: usize) -> Recurrence<T> {
        let (c, lam): (Vec<T>, Vec<T>) = (1..=len)
            .map(|n| {
                let (c, l) = self.coeff(n);
                (T::real(c), T::real(l))
            })
            .unzip();
        Recurrence { c, lam }
    }
}

/// Returns `(c_n, lambda_n)` for `n = 1..=n_max`, validating positive definiteness.
pub fn recurrence_coefficients(family: &FamilySpec, n_max: usize) -> Result<Vec<(f64, f64)>> {
    if n_max == 0 {
        return Err(OpxError::InvalidInput("n_max must be at least 1".into()));
    }
    let out: Vec<(f64, f64)> = (1..=n_max).map(|n| family.coeff(n)).collect();
    for (i, &(c, l)) in out.iter().enumerate() {
        if !c.is_finite() || !l.is_finite() {
            return Err(OpxError::CoefficientsUnavailable(i));
        }
        if l <= 0.0 {
            return Err(OpxError::NotPositiveDefinite { index: i + 1, value: l });
        }
    }
    Ok(out)
}

/// A finite table of recurrence coefficients over a scalar type.
///
/// Index conventions are 1-based to match `c_n`, `lambda_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct Recurrence<T> {
    c: Vec<T>,
    lam: Vec<T>,
}

impl<T: Scalar> Recurrence<T> {
    /// Build from `c_1..c_N` and `lambda_1..lambda_N`.
    pub fn new(c: Vec<T>, lam: Vec<T>) -> Result<Self> {
        if c.len() != lam.len() || c.is_empty() {
            return Err(OpxError::InvalidInput(format!(
                "coefficient arrays must be non-empty and equal length ({} vs {})",
                c.len(),
                lam.len()
            )));
        }
        Ok(Recurrence { c, lam })
    }

    /// Number of coefficient pairs held.
    pub fn len(&self) -> usize {
        self.c.len()
    }

    pub fn is_empty(&self) -> bool {
        self.c.is_empty()
    }

    /// `c_n`, 1-based.
    #[inline]
    pub fn c(&self, n: usize) -> T {
        self.c[n - 1]
    }

    /// `lambda_n`, 1-based; `lambda_1` is the total mass.
    #[inline]
    pub fn lambda(&self, n: usize) -> T {
        self.lam[n - 1]
    }

    pub fn mu0(&self) -> T {
        self.lam[0]
    }

    /// Highest degree that [`Recurrence::eval`] can reach.
    pub fn max_degree(&self) -> usize {
        self.c.len()
    }

    /// Replace `lambda_1`.
    pub fn with_mu0(mut self, mu0: T) -> Self {
        self.lam[0] = mu0;
        self
    }

    /// Keep only the first `len` pairs.
    pub fn truncated(&self, len: usize) -> Self {
        Recurrence {
            c: self.c[..len].to_vec(),
            lam: self.lam[..len].to_vec(),
        }
    }

    /// Complex embedding of this table.
    pub fn to_complex(&self) -> Recurrence<Complex64> {
        Recurrence {
            c: self.c.iter().map(|v| v.to_c64()).collect(),
            lam: self.lam.iter().map(|v| v.to_c64()).collect(),
        }
    }

    /// Values `P_0(x)..P_n(x)`.
    ///
    /// # Panics
    /// If `n` exceeds [`Recurrence::max_degree`].
    pub fn eval(&self, n: usize, x: T) -> Vec<T> {
        assert!(n <= self.max_degree(), "degree {n} beyond recurrence table");
        let mut v = Vec::with_capacity(n + 1);
        v.push(T::one());
        if n == 0 {
            return v;
        }
        v.push(x - self.c(1));
        for j in 1..n {
            let next = (x - self.c(j + 1)) * v[j] - self.lambda(j + 1) * v[j - 1];
            v.push(next);
        }
        v
    }

    /// Values and first derivatives of `P_0..P_n` at `x`.
    pub fn eval_with_derivs(&self, n: usize, x: T) -> (Vec<T>, Vec<T>) {
        let v = self.eval(n, x);
        let mut d = Vec::with_capacity(n + 1);
        d.push(T::zero());
        if n >= 1 {
            d.push(T::one());
        }
        for j in 1..n {
            let next = v[j] + (x - self.c(j + 1)) * d[j] - self.lambda(j + 1) * d[j - 1];
            d.push(next);
        }
        (v, d)
    }

    /// Squared norms `h_j = lambda_1 ... lambda_{j+1}`, `j = 0..=n`.
    pub fn norms(&self, n: usize) -> Vec<T> {
        let mut h = Vec::with_capacity(n + 1);
        let mut acc = T::one();
        for j in 0..=n {
            acc = acc * self.lambda(j + 1);
            h.push(acc);
        }
        h
    }
}

/// Evaluated monic polynomial values (and optionally derivatives) at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct PolySequence<T> {
    pub x: T,
    pub values: Vec<T>,
    pub derivs: Option<Vec<T>>,
}

/// Evaluates `P_0..P_n` of `family` at `x`.
pub fn eval_sequence<T: Scalar>(
    family: &FamilySpec,
    n: usize,
    x: T,
    with_derivs: bool,
) -> PolySequence<T> {
    let rec = family.recurrence::<T>(n.max(1));
    if with_derivs {
        let (values, derivs) = rec.eval_with_derivs(n, x);
        PolySequence { x, values, derivs: Some(derivs) }
    } else {
        PolySequence { x, values: rec.eval(n, x), derivs: None }
    }
}
