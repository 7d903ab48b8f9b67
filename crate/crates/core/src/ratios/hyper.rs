//! Truncated and terminating hypergeometric series.

use crate::error::{OpxError, Result};

/// Which series to sum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HypKind {
    /// `2F1(p, q; r; z)`.
    Gauss { p: f64, q: f64, r: f64 },
    /// `1F1(p; r; z)`.
    Kummer { p: f64, r: f64 },
}

/// True for `0, -1, -2, ...`.
pub fn is_nonpositive_integer(v: f64) -> bool {
    v <= 0.0 && v.fract() == 0.0
}

/// Sums at most `terms` terms of the series, stopping early when a numerator
/// parameter is a nonpositive integer.
pub fn hyp_series(kind: HypKind, z: f64, terms: usize) -> Result<f64> {
    hyp_series_scaled(kind, z, terms).map(|(s, _)| s)
}

/// As [`hyp_series`], also returning the sum of term magnitudes.
pub fn hyp_series_scaled(kind: HypKind, z: f64, terms: usize) -> Result<(f64, f64)> {
    let (nums, r): (Vec<f64>, f64) = match kind {
        HypKind::Gauss { p, q, r } => (vec![p, q], r),
        HypKind::Kummer { p, r } => (vec![p], r),
    };
    if is_nonpositive_integer(r) {
        return Err(OpxError::ParameterOutOfRange(format!(
            "lower parameter {r} is a nonpositive integer"
        )));
    }
    let terminating = nums.iter().any(|&a| is_nonpositive_integer(a));
    if matches!(kind, HypKind::Gauss { .. }) && !terminating && z.abs() >= 1.0 {
        return Err(OpxError::Divergent(z.abs()));
    }
    let mut sum = 1.0;
    let mut abs_sum = 1.0;
    let mut term: f64 = 1.0;
    for k in 0..terms {
        let kf = k as f64;
        let mut factor = z / ((r + kf) * (kf + 1.0));
        for &a in &nums {
            factor *= a + kf;
        }
        term *= factor;
        if term == 0.0 {
            break;
        }
        sum += term;
        abs_sum += term.abs();
    }
    Ok((sum, abs_sum))
}
