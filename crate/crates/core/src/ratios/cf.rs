//! Backward evaluation of continued fractions of the form
//! `lead / (1 + s_1 a_1 z / (1 + s_2 a_2 z / (1 + ...)))`.

use crate::error::{OpxError, Result};

/// Magnitude floor for intermediate denominators.
pub const TINY: f64 = 1e-300;

/// Agreement required between a pass at `depth` and one at `depth + 10`.
pub const CF_TOL: f64 = 1e-13;

/// Largest depth tried before giving up.
pub const DEPTH_CAP: usize = 1 << 16;

/// Sign attached to a partial numerator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

/// A continued fraction in one variable `z`.
pub struct ContinuedFraction<'a> {
    pub lead: f64,
    pub z: f64,
    partials: Box<dyn Fn(usize) -> (f64, Sign) + 'a>,
}

impl std::fmt::Debug for ContinuedFraction<'_> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ContinuedFraction").field("lead", &self.lead).field("z", &self.z).finish()
    }
}

/// Result of one evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CfValue {
    pub value: f64,
    pub depth: usize,
    /// A denominator had to be floored at [`TINY`].
    pub floored: bool,
}

impl<'a> ContinuedFraction<'a> {
    /// `partials(j)` gives `(a_j, s_j)` for `j >= 1`.
    pub fn new<F>(lead: f64, z: f64, partials: F) -> Self
    where
        F: Fn(usize) -> (f64, Sign) + 'a,
    {
        ContinuedFraction { lead, z, partials: Box::new(partials) }
    }

    /// The `j`-th partial numerator including sign and `z`.
    pub fn numerator(&self, j: usize) -> f64 {
        let (a, s) = (self.partials)(j);
        s.value() * a * self.z
    }

    /// Evaluates with exactly `depth` partial numerators.
    pub fn evaluate(&self, depth: usize) -> CfValue {
        let mut t: f64 = 1.0;
        let mut floored = false;
        for j in (1..=depth).rev() {
            let num = self.numerator(j);
            if num == 0.0 {
                t = 1.0;
                continue;
            }
            if t.abs() < TINY {
                t = TINY.copysign(if t == 0.0 { 1.0 } else { t });
                floored = true;
            }
            t = 1.0 + num / t;
        }
        if t.abs() < TINY {
            t = TINY.copysign(if t == 0.0 { 1.0 } else { t });
            floored = true;
        }
        CfValue { value: self.lead / t, depth, floored }
    }

    /// Evaluates at `depth` and `depth + 10`, doubling the depth until the two
    /// agree to [`CF_TOL`] relative.
    pub fn evaluate_adaptive(&self, depth: usize) -> Result<CfValue> {
        let mut d = depth.max(1);
        loop {
            let a = self.evaluate(d);
            let b = self.evaluate(d + 10);
            if !b.value.is_finite() {
                return Err(OpxError::ZeroDenominator { depth: d + 10 });
            }
            if (a.value - b.value).abs() <= CF_TOL * b.value.abs() {
                return Ok(CfValue { floored: a.floored || b.floored, ..b });
            }
            if d >= DEPTH_CAP {
                return Err(OpxError::NonConvergent(format!(
                    "continued fraction unsettled at depth {d}: {} vs {}",
                    a.value, b.value
                )));
            }
            d *= 2;
        }
    }
}
