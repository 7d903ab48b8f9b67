//! Chain sequences and their minimal parameter sequences.

use crate::error::{OpxError, Result};
use crate::families::FamilySpec;

/// A sequence `l_n` with its minimal parameters `m_n` and complementary data.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainSequence {
    /// `l_1..l_N` (index `n - 1`).
    pub l: Vec<f64>,
    /// `m_0..m_N`, `m_0 = 0`.
    pub m: Vec<f64>,
    /// `0 < m_n < 1` for all computed `n >= 1`.
    pub positive: bool,
    /// `k_n = 1 - l_n`.
    pub complementary: Vec<f64>,
    /// Minimal parameters of the complementary sequence, if the recurrence
    /// does not break down.
    pub complementary_m: Option<Vec<f64>>,
    pub complementary_positive: Option<bool>,
}

/// `m_0 = 0`, `m_n = l_n / (1 - m_{n-1})`.
pub fn minimal_parameters(l: &[f64]) -> Result<Vec<f64>> {
    let mut m = Vec::with_capacity(l.len() + 1);
    m.push(0.0);
    for (i, &ln) in l.iter().enumerate() {
        let prev = m[i];
        if prev == 1.0 {
            return Err(OpxError::DivisionByZero(i + 1));
        }
        m.push(ln / (1.0 - prev));
    }
    Ok(m)
}

fn all_inside(m: &[f64]) -> bool {
    m.iter().skip(1).all(|&v| v > 0.0 && v < 1.0)
}

/// Minimal parameters and positivity verdict for `l_1..l_{n_max}`.
pub fn chain_params(l: &[f64], n_max: usize) -> Result<ChainSequence> {
    if n_max == 0 {
        return Err(OpxError::InvalidInput("n_max must be at least 1".into()));
    }
    if l.len() < n_max {
        return Err(OpxError::InvalidInput(format!(
            "chain sequence needs {n_max} terms, got {}",
            l.len()
        )));
    }
    let l = l[..n_max].to_vec();
    let m = minimal_parameters(&l)?;
    let complementary: Vec<f64> = l.iter().map(|v| 1.0 - v).collect();
    let cm = minimal_parameters(&complementary).ok();
    let cpos = cm.as_deref().map(all_inside);
    Ok(ChainSequence {
        positive: all_inside(&m),
        l,
        m,
        complementary,
        complementary_m: cm,
        complementary_positive: cpos,
    })
}

/// `l_n = lambda_{n+1} / (c_n c_{n+1})`, `n = 1..=n_max`.
pub fn family_chain_sequence(family: &FamilySpec, n_max: usize) -> Vec<f64> {
    (1..=n_max)
        .map(|n| {
            let (cn, _) = family.coeff(n);
            let (cn1, ln1) = family.coeff(n + 1);
            ln1 / (cn * cn1)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quarter_sequence() {
        let s = chain_params(&[0.25; 3], 3).unwrap();
        assert_eq!(s.m[0], 0.0);
        assert!((s.m[2] - 1.0 / 3.0).abs() < 1e-16);
        assert!((s.m[3] - 0.375).abs() < 1e-16);
        assert!(s.positive);
    }

    #[test]
    fn breakdown_reported() {
        assert!(matches!(chain_params(&[1.0, 0.5], 2), Err(OpxError::DivisionByZero(2))));
    }
}
