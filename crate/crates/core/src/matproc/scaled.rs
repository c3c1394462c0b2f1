use super::matrix::check_dim;
use super::{NonNegMatrix, SupportPattern};
use crate::error::{Error, Result};

/// A non-negative matrix held as natural logs of its entries.
///
/// Structural zeros are `-∞`. This is the factor type consumed by
/// [`ScaledProduct`]; it can carry entries far below the `f64` range
/// (for instance `e^{-10^5}`), which the linear [`NonNegMatrix`] cannot.
#[derive(Clone, Debug, PartialEq)]
pub struct LogMatrix {
    dim: usize,
    log_entries: Vec<f64>,
    support: SupportPattern,
}

impl LogMatrix {
    pub fn from_log_entries(dim: usize, log_entries: Vec<f64>) -> Result<Self> {
        check_dim(dim)?;
        if log_entries.len() != dim * dim {
            return Err(Error::InvalidMatrix(format!(
                "{} log-entries supplied for a {dim}x{dim} matrix",
                log_entries.len()
            )));
        }
        if log_entries.iter().any(|x| x.is_nan() || *x == f64::INFINITY) {
            return Err(Error::InvalidMatrix(
                "log-entries must be finite or -inf".into(),
            ));
        }
        let support = SupportPattern::from_fn(dim, |i, j| log_entries[i * dim + j].is_finite());
        Ok(LogMatrix {
            dim,
            log_entries,
            support,
        })
    }

    /// `e^{log_scale} · matrix`.
    pub fn scaled(matrix: &NonNegMatrix, log_scale: f64) -> Result<Self> {
        if !log_scale.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "log-scale {log_scale} must be finite"
            )));
        }
        let log_entries = matrix.entries().iter().map(|x| x.ln() + log_scale).collect();
        Ok(LogMatrix {
            dim: matrix.dim(),
            log_entries,
            support: matrix.support().clone(),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn log_entries(&self) -> &[f64] {
        &self.log_entries
    }

    pub fn support(&self) -> &SupportPattern {
        &self.support
    }

    /// Natural log of the entry-sum norm; `-∞` for the zero matrix.
    pub fn log_norm(&self) -> f64 {
        log_sum_exp(&self.log_entries)
    }

    /// Log of the smallest structurally nonzero entry.
    pub fn log_min_nonzero(&self) -> Option<f64> {
        self.log_entries
            .iter()
            .copied()
            .filter(|x| x.is_finite())
            .min_by(f64::total_cmp)
    }

    pub fn log_max_entry(&self) -> Option<f64> {
        self.log_entries
            .iter()
            .copied()
            .filter(|x| x.is_finite())
            .max_by(f64::total_cmp)
    }

    /// Exponentiates back into linear form.
    pub fn to_matrix(&self) -> Result<NonNegMatrix> {
        materialize(self.dim, &self.log_entries, &self.support)
    }
}

impl From<&NonNegMatrix> for LogMatrix {
    fn from(matrix: &NonNegMatrix) -> Self {
        LogMatrix::scaled(matrix, 0.0).expect("zero log-scale is finite")
    }
}

pub(crate) fn log_sum_exp(xs: &[f64]) -> f64 {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + xs.iter().map(|x| (x - max).exp()).sum::<f64>().ln()
}

fn materialize(dim: usize, log_entries: &[f64], support: &SupportPattern) -> Result<NonNegMatrix> {
    let entries: Vec<f64> = log_entries.iter().map(|x| x.exp()).collect();
    for i in 0..dim {
        for j in 0..dim {
            if support.get(i, j) && entries[i * dim + j] == 0.0 {
                return Err(Error::Underflow { row: i, col: j });
            }
        }
    }
    NonNegMatrix::new(dim, entries)
}

/// `out = a · b` in the log domain, entry by entry.
fn log_matmul(dim: usize, a: &[f64], b: &[f64], out: &mut [f64]) {
    for i in 0..dim {
        let row = &a[i * dim..(i + 1) * dim];
        for j in 0..dim {
            let mut max = f64::NEG_INFINITY;
            for (k, &x) in row.iter().enumerate() {
                let t = x + b[k * dim + j];
                if t > max {
                    max = t;
                }
            }
            out[i * dim + j] = if max == f64::NEG_INFINITY {
                max
            } else {
                let sum: f64 = row
                    .iter()
                    .enumerate()
                    .map(|(k, &x)| (x + b[k * dim + j] - max).exp())
                    .sum();
                max + sum.ln()
            };
        }
    }
}

/// Running product of non-negative matrices, held as a unit-norm matrix
/// times `exp(log_norm)`.
///
/// The unit matrix is stored in the log domain, so entries that would
/// underflow an `f64` stay representable and a structurally nonzero entry
/// never silently becomes zero. The support pattern is tracked exactly with
/// boolean products.
#[derive(Clone, Debug, PartialEq)]
pub struct ScaledProduct {
    dim: usize,
    unit_log: Vec<f64>,
    log_scale: f64,
    len: usize,
    support: SupportPattern,
}

impl ScaledProduct {
    /// The empty product.
    pub fn identity(dim: usize) -> Self {
        let shift = -(dim as f64).ln();
        let mut unit_log = vec![f64::NEG_INFINITY; dim * dim];
        for i in 0..dim {
            unit_log[i * dim + i] = shift;
        }
        ScaledProduct {
            dim,
            unit_log,
            log_scale: (dim as f64).ln(),
            len: 0,
            support: SupportPattern::identity(dim),
        }
    }

    /// A single factor.
    pub fn from_factor(factor: &LogMatrix) -> Self {
        let mut p = ScaledProduct::identity(factor.dim);
        p.unit_log.clone_from(&factor.log_entries);
        p.log_scale = 0.0;
        p.support = factor.support.clone();
        p.len = 1;
        p.normalize(0.0);
        p
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of factors multiplied in.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// `log ‖product‖`; `-∞` once the product is the zero matrix. The empty
    /// product reports `0`.
    pub fn log_norm(&self) -> f64 {
        if self.len == 0 {
            0.0
        } else {
            self.log_scale
        }
    }

    pub fn is_zero(&self) -> bool {
        self.log_scale == f64::NEG_INFINITY
    }

    pub fn support(&self) -> &SupportPattern {
        &self.support
    }

    /// Log-entries of the unit-norm matrix.
    pub fn unit_log_entries(&self) -> &[f64] {
        &self.unit_log
    }

    /// The unit-norm matrix in linear form. Fails with an underflow error if
    /// a structurally nonzero entry is too small for an `f64`.
    pub fn unit_matrix(&self) -> Result<NonNegMatrix> {
        materialize(self.dim, &self.unit_log, &self.support)
    }

    /// The whole product in linear form.
    pub fn to_matrix(&self) -> Result<NonNegMatrix> {
        if self.is_zero() {
            return Ok(NonNegMatrix::zeros(self.dim));
        }
        let logs: Vec<f64> = self.unit_log.iter().map(|x| x + self.log_scale).collect();
        let m = materialize(self.dim, &logs, &self.support)?;
        m.check_no_underflow()?;
        Ok(m)
    }

    fn normalize(&mut self, added_scale: f64) {
        let s = log_sum_exp(&self.unit_log);
        if s == f64::NEG_INFINITY {
            self.log_scale = f64::NEG_INFINITY;
            return;
        }
        for x in &mut self.unit_log {
            *x -= s;
        }
        self.log_scale += s + added_scale;
    }

    /// Right-multiplies by `factor` in place.
    pub fn push(&mut self, factor: &LogMatrix) -> Result<()> {
        if factor.dim != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: factor.dim,
            });
        }
        self.len += 1;
        if self.is_zero() {
            return Ok(());
        }
        let mut out = vec![0.0; self.dim * self.dim];
        log_matmul(self.dim, &self.unit_log, &factor.log_entries, &mut out);
        self.unit_log = out;
        self.support = self.support.product(&factor.support);
        self.normalize(0.0);
        self.check_support()
    }

    /// Right-multiplies by a linear matrix in place.
    pub fn push_matrix(&mut self, factor: &NonNegMatrix) -> Result<()> {
        self.push(&LogMatrix::from(factor))
    }

    /// `self · other` as a new product of `len + other.len` factors.
    pub fn concat(&self, other: &ScaledProduct) -> Result<ScaledProduct> {
        if other.dim != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        let mut out = ScaledProduct {
            dim: self.dim,
            unit_log: vec![0.0; self.dim * self.dim],
            log_scale: self.log_scale + other.log_scale,
            len: self.len + other.len,
            support: self.support.product(&other.support),
        };
        if out.log_scale == f64::NEG_INFINITY {
            out.unit_log.fill(f64::NEG_INFINITY);
            return Ok(out);
        }
        log_matmul(self.dim, &self.unit_log, &other.unit_log, &mut out.unit_log);
        out.normalize(0.0);
        out.check_support()?;
        Ok(out)
    }

    fn check_support(&self) -> Result<()> {
        if self.is_zero() {
            return if self.support.is_zero() {
                Ok(())
            } else {
                Err(Error::Range("log-domain product collapsed to zero".into()))
            };
        }
        for i in 0..self.dim {
            for j in 0..self.dim {
                let finite = self.unit_log[i * self.dim + j].is_finite();
                if finite != self.support.get(i, j) {
                    return Err(Error::Underflow { row: i, col: j });
                }
            }
        }
        Ok(())
    }

    /// Birkhoff contraction coefficient of the product, from log cross-ratios.
    pub fn birkhoff_tau(&self) -> Result<f64> {
        let d = self.dim;
        if !(self.support.row_allowable() && self.support.column_allowable()) {
            return Err(Error::Domain("tau requires an allowable matrix".into()));
        }
        if !self.support.is_full() {
            return Ok(1.0);
        }
        let l = |i: usize, j: usize| self.unit_log[i * d + j];
        let mut log_phi = f64::INFINITY;
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    for s in 0..d {
                        log_phi = log_phi.min(l(i, k) + l(j, s) - l(j, k) - l(i, s));
                    }
                }
            }
        }
        let root = (0.5 * log_phi).exp();
        Ok((1.0 - root) / (1.0 + root))
    }
}

/// Functional form of [`ScaledProduct::push_matrix`].
pub fn scaled_multiply(acc: &ScaledProduct, factor: &NonNegMatrix) -> Result<ScaledProduct> {
    let mut out = acc.clone();
    out.push_matrix(factor)?;
    Ok(out)
}

/// Envelope `(−cn, cn)` for `log ‖B₁⋯Bₙ‖` of a nonzero product, with
/// `c = max{|log a_*|, |log(a^* d²)|}`.
pub fn log_norm_bounds(n: usize, a_star: f64, a_upper: f64, dim: usize) -> Result<(f64, f64)> {
    if !(a_star > 0.0 && a_star <= a_upper && a_upper.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "need 0 < a_star <= a_upper, got {a_star} and {a_upper}"
        )));
    }
    Ok(log_norm_bounds_log(n, a_star.ln(), a_upper.ln(), dim))
}

/// [`log_norm_bounds`] with the entry bounds given as logarithms.
pub fn log_norm_bounds_log(n: usize, log_a_star: f64, log_a_upper: f64, dim: usize) -> (f64, f64) {
    let c = log_a_star
        .abs()
        .max((log_a_upper + 2.0 * (dim as f64).ln()).abs());
    let bound = c * n as f64;
    (-bound, bound)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[f64]]) -> NonNegMatrix {
        NonNegMatrix::from_rows(rows).unwrap()
    }

    #[test]
    fn single_factor_from_identity_seed() {
        let b = m(&[&[1.0, 2.0], &[3.0, 4.0]]);
        let acc = scaled_multiply(&ScaledProduct::identity(2), &b).unwrap();
        assert!((acc.log_norm() - 10f64.ln()).abs() < 1e-15);
        let unit = acc.unit_matrix().unwrap();
        for (x, y) in unit.entries().iter().zip(b.entries()) {
            assert!((x - y / 10.0).abs() < 1e-15);
        }
        assert_eq!(acc.len(), 1);
    }

    #[test]
    fn empty_product_has_zero_log_norm() {
        let p = ScaledProduct::identity(3);
        assert_eq!(p.log_norm(), 0.0);
        assert!(p.is_empty());
        let unit = p.unit_matrix().unwrap();
        assert!((unit.entry_sum_norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn nilpotent_pattern_sets_zero_flag() {
        let n = m(&[&[0.0, 1.0], &[0.0, 0.0]]);
        let mut acc = ScaledProduct::identity(2);
        acc.push_matrix(&n).unwrap();
        assert!(!acc.is_zero());
        acc.push_matrix(&n).unwrap();
        assert!(acc.is_zero());
        assert_eq!(acc.log_norm(), f64::NEG_INFINITY);
        assert!(acc.support().is_zero());
        acc.push_matrix(&NonNegMatrix::ones(2)).unwrap();
        assert!(acc.is_zero());
        assert_eq!(acc.len(), 3);
    }

    #[test]
    fn thirty_diagonal_factors() {
        let d = NonNegMatrix::diagonal(&[10.0, 0.1]).unwrap();
        let mut acc = ScaledProduct::identity(2);
        for _ in 0..30 {
            acc.push_matrix(&d).unwrap();
        }
        // log(10^30 + 10^-30) = 30 log 10 + log1p(10^-60)
        let expected = 30.0 * 10f64.ln();
        assert!((acc.log_norm() - expected).abs() / expected < 1e-12);
        // the small corner is ~1e-60 relative: representable in log form
        assert!(acc.unit_log_entries()[3].is_finite());
    }

    #[test]
    fn extreme_range_keeps_structure() {
        let d = NonNegMatrix::diagonal(&[1e10, 1e-10]).unwrap();
        let mut acc = ScaledProduct::identity(2);
        for _ in 0..100 {
            acc.push_matrix(&d).unwrap();
        }
        assert_eq!(acc.support(), &SupportPattern::identity(2));
        // the linear unit matrix cannot hold 1e-2000
        assert_eq!(acc.unit_matrix(), Err(Error::Underflow { row: 1, col: 1 }));
    }

    #[test]
    fn concat_matches_sequential_push() {
        let a = m(&[&[1.0, 2.0], &[0.5, 0.0]]);
        let b = m(&[&[0.0, 3.0], &[1.0, 1.0]]);
        let mut left = ScaledProduct::identity(2);
        left.push_matrix(&a).unwrap();
        left.push_matrix(&b).unwrap();
        let mut right = ScaledProduct::identity(2);
        right.push_matrix(&b).unwrap();
        right.push_matrix(&a).unwrap();
        let joined = left.concat(&right).unwrap();
        let mut seq = left.clone();
        seq.push_matrix(&b).unwrap();
        seq.push_matrix(&a).unwrap();
        assert_eq!(joined.len(), 4);
        assert!((joined.log_norm() - seq.log_norm()).abs() < 1e-12);
        for (x, y) in joined.unit_log_entries().iter().zip(seq.unit_log_entries()) {
            assert!((x - y).abs() < 1e-12 || (x.is_infinite() && y.is_infinite()));
        }
    }

    #[test]
    fn envelope_examples() {
        assert_eq!(log_norm_bounds(5, 1.0, 1.0, 1).unwrap(), (0.0, 0.0));
        let (lo, hi) = log_norm_bounds(3, 0.1, 10.0, 2).unwrap();
        assert!((hi - 3.0 * 40f64.ln()).abs() < 1e-12);
        assert_eq!(lo, -hi);
        assert!(log_norm_bounds(3, 0.0, 1.0, 2).is_err());
    }

    #[test]
    fn tau_of_product_matches_linear_tau() {
        let b = m(&[&[2.0, 1.0], &[1.0, 1.0]]);
        let p = ScaledProduct::from_factor(&LogMatrix::from(&b));
        assert!((p.birkhoff_tau().unwrap() - b.birkhoff_tau().unwrap()).abs() < 1e-14);
    }
}
