use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The correction sequence `c_n` of a quasi-subadditive sequence
/// `a_{n+m} ≤ a_n + a_m + c_{n∧m}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CBound {
    Zero,
    Constant { value: f64 },
    /// `coef · n^exponent`
    Power { coef: f64, exponent: f64 },
    /// Explicit values; missing `n` are an error.
    Table { values: BTreeMap<usize, f64> },
}

impl CBound {
    pub fn eval(&self, n: usize) -> Result<f64> {
        match self {
            CBound::Zero => Ok(0.0),
            CBound::Constant { value } => Ok(*value),
            CBound::Power { coef, exponent } => Ok(coef * (n as f64).powf(*exponent)),
            CBound::Table { values } => values
                .get(&n)
                .copied()
                .ok_or_else(|| Error::InvalidParameter(format!("no c_n given for n = {n}"))),
        }
    }
}

/// A triple `(n, n, 2n)` where `a_{2n} > 2 a_n + c_n`.
#[derive(Clone, Debug, PartialEq)]
pub struct FeketeViolation {
    pub n: usize,
    pub m: usize,
    /// `a_{n+m} − (a_n + a_m + c_{n∧m})`, positive.
    pub excess: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FeketeReport {
    /// `(n, (a_n + |c_n|)/n)`: upper envelope for `limsup a_n / n`.
    pub envelope: Vec<(usize, f64)>,
    /// Running minimum of the envelope.
    pub running_min: Vec<f64>,
    /// `a_n / n` at the largest `n`.
    pub estimate: f64,
    pub violations: Vec<FeketeViolation>,
}

impl FeketeReport {
    pub fn envelope_is_decreasing(&self) -> bool {
        self.envelope.windows(2).all(|w| w[1].1 <= w[0].1)
    }
}

/// Limit estimate for `a_n / n` from values on a doubling grid `n_0 2^k`,
/// with the checks available on that grid.
pub fn fekete_extrapolate(values: &[(usize, f64)], c: &CBound) -> Result<FeketeReport> {
    if values.len() < 3 {
        return Err(Error::InvalidParameter("need at least three values".into()));
    }
    if values.windows(2).any(|w| w[1].0 != 2 * w[0].0) || values[0].0 == 0 {
        return Err(Error::InvalidParameter(
            "values must sit on a doubling grid n0, 2n0, 4n0, ...".into(),
        ));
    }
    let mut envelope = Vec::with_capacity(values.len());
    let mut running_min = Vec::with_capacity(values.len());
    let mut lowest = f64::INFINITY;
    for &(n, a) in values {
        let e = (a + c.eval(n)?.abs()) / n as f64;
        lowest = lowest.min(e);
        envelope.push((n, e));
        running_min.push(lowest);
    }
    let mut violations = Vec::new();
    for w in values.windows(2) {
        let ((n, an), (_, a2n)) = (w[0], w[1]);
        let bound = 2.0 * an + c.eval(n)?;
        let excess = a2n - bound;
        if excess > 1e-12 * bound.abs().max(1.0) {
            violations.push(FeketeViolation { n, m: n, excess });
        }
    }
    let &(n_last, a_last) = values.last().unwrap();
    Ok(FeketeReport {
        envelope,
        running_min,
        estimate: a_last / n_last as f64,
        violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(f: impl Fn(f64) -> f64) -> Vec<(usize, f64)> {
        (0..12).map(|k| 4usize << k).map(|n| (n, f(n as f64))).collect()
    }

    #[test]
    fn additive_sequence() {
        let r = fekete_extrapolate(&grid(|n| 3.0 * n), &CBound::Zero).unwrap();
        assert_eq!(r.estimate, 3.0);
        assert!(r.violations.is_empty());
    }

    #[test]
    fn square_root_correction() {
        let c = CBound::Power {
            coef: 2.0,
            exponent: 0.5,
        };
        let r = fekete_extrapolate(&grid(|n| 3.0 * n + n.sqrt()), &c).unwrap();
        assert!(r.violations.is_empty());
        assert!(r.envelope_is_decreasing());
        assert!((r.estimate - 3.0).abs() < 0.02);
        assert!(r.running_min.last().unwrap() - 3.0 < 0.05);
    }

    #[test]
    fn flags_superadditive_step() {
        let mut v = grid(|n| 3.0 * n);
        v[5].1 += 10.0;
        let r = fekete_extrapolate(&v, &CBound::Zero).unwrap();
        assert_eq!(r.violations.len(), 1);
        assert_eq!(r.violations[0].n, v[4].0);
        assert!((r.violations[0].excess - 10.0).abs() < 1e-9);
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(fekete_extrapolate(&[(1, 1.0), (2, 2.0)], &CBound::Zero).is_err());
        assert!(fekete_extrapolate(&[(1, 1.0), (3, 2.0), (6, 1.0)], &CBound::Zero).is_err());
    }
}
