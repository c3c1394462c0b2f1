use std::fmt;

use super::{SupportPattern, MAX_DIM};
use crate::error::{Error, Result};

/// A `d × d` matrix with non-negative entries and an exact support pattern.
///
/// Structural zeros are exactly `0.0`; every structurally nonzero entry is
/// strictly positive and finite.
#[derive(Clone, PartialEq)]
pub struct NonNegMatrix {
    dim: usize,
    entries: Vec<f64>,
    support: SupportPattern,
}

/// Allowability flags, read off the support pattern.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Allowability {
    pub row_allowable: bool,
    pub column_allowable: bool,
    pub positive: bool,
}

impl Allowability {
    pub fn allowable(&self) -> bool {
        self.row_allowable && self.column_allowable
    }

    /// Neither row- nor column-allowable.
    pub fn none(&self) -> bool {
        !self.row_allowable && !self.column_allowable
    }
}

pub(crate) fn check_dim(dim: usize) -> Result<()> {
    if dim == 0 || dim > MAX_DIM {
        return Err(Error::InvalidMatrix(format!(
            "dimension {dim} outside 1..={MAX_DIM}"
        )));
    }
    Ok(())
}

impl NonNegMatrix {
    /// Builds a matrix from row-major entries.
    pub fn new(dim: usize, entries: Vec<f64>) -> Result<Self> {
        check_dim(dim)?;
        if entries.len() != dim * dim {
            return Err(Error::InvalidMatrix(format!(
                "{} entries supplied for a {dim}x{dim} matrix",
                entries.len()
            )));
        }
        if let Some(bad) = entries.iter().find(|x| !x.is_finite() || **x < 0.0) {
            return Err(Error::InvalidMatrix(format!(
                "entry {bad} is not a finite non-negative number"
            )));
        }
        let support = SupportPattern::from_fn(dim, |i, j| entries[i * dim + j] > 0.0);
        Ok(NonNegMatrix {
            dim,
            entries,
            support,
        })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let dim = rows.len();
        let mut entries = Vec::with_capacity(dim * dim);
        for row in rows {
            let row = row.as_ref();
            if row.len() != dim {
                return Err(Error::InvalidMatrix("matrix is not square".into()));
            }
            entries.extend_from_slice(row);
        }
        NonNegMatrix::new(dim, entries)
    }

    pub fn identity(dim: usize) -> Self {
        Self::diagonal(&vec![1.0; dim]).expect("identity is valid")
    }

    pub fn ones(dim: usize) -> Self {
        NonNegMatrix::new(dim, vec![1.0; dim * dim]).expect("all-ones is valid")
    }

    pub fn zeros(dim: usize) -> Self {
        NonNegMatrix::new(dim, vec![0.0; dim * dim]).expect("zero matrix is valid")
    }

    pub fn diagonal(diag: &[f64]) -> Result<Self> {
        let dim = diag.len();
        let mut entries = vec![0.0; dim * dim];
        for (i, &x) in diag.iter().enumerate() {
            entries[i * dim + i] = x;
        }
        NonNegMatrix::new(dim, entries)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.entries[row * self.dim + col]
    }

    /// Row-major entries.
    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.entries.chunks(self.dim)
    }

    pub fn support(&self) -> &SupportPattern {
        &self.support
    }

    /// `‖B‖ = Σ_{i,j} b_{i,j}`.
    pub fn entry_sum_norm(&self) -> f64 {
        self.entries.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.support.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.support.is_full()
    }

    pub fn allowability(&self) -> Allowability {
        Allowability {
            row_allowable: self.support.row_allowable(),
            column_allowable: self.support.column_allowable(),
            positive: self.support.is_full(),
        }
    }

    /// Smallest structurally nonzero entry, if any.
    pub fn min_nonzero(&self) -> Option<f64> {
        self.entries
            .iter()
            .copied()
            .filter(|&x| x > 0.0)
            .min_by(f64::total_cmp)
    }

    pub fn max_entry(&self) -> f64 {
        self.entries.iter().copied().fold(0.0, f64::max)
    }

    pub fn transpose(&self) -> NonNegMatrix {
        let d = self.dim;
        let mut entries = vec![0.0; d * d];
        for i in 0..d {
            for j in 0..d {
                entries[j * d + i] = self.entries[i * d + j];
            }
        }
        NonNegMatrix {
            dim: d,
            entries,
            support: self.support.transpose(),
        }
    }

    pub fn scale(&self, factor: f64) -> Result<NonNegMatrix> {
        if !(factor.is_finite() && factor > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "scale factor {factor} must be positive"
            )));
        }
        let entries = self.entries.iter().map(|x| x * factor).collect();
        let out = NonNegMatrix {
            dim: self.dim,
            entries,
            support: self.support.clone(),
        };
        out.check_no_underflow()?;
        Ok(out)
    }

    /// Plain product `self · other`. The support of the result is the boolean
    /// product of the supports; an entry that should be nonzero but rounds to
    /// zero is reported as underflow.
    pub fn mul(&self, other: &NonNegMatrix) -> Result<NonNegMatrix> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        let d = self.dim;
        let mut entries = vec![0.0; d * d];
        for i in 0..d {
            for k in 0..d {
                let a = self.entries[i * d + k];
                if a == 0.0 {
                    continue;
                }
                for j in 0..d {
                    entries[i * d + j] += a * other.entries[k * d + j];
                }
            }
        }
        let out = NonNegMatrix {
            dim: d,
            entries,
            support: self.support.product(&other.support),
        };
        out.check_no_underflow()?;
        Ok(out)
    }

    pub(crate) fn check_no_underflow(&self) -> Result<()> {
        for i in 0..self.dim {
            for j in 0..self.dim {
                let x = self.entries[i * self.dim + j];
                if self.support.get(i, j) && x <= 0.0 {
                    return Err(Error::Underflow { row: i, col: j });
                }
                if !x.is_finite() {
                    return Err(Error::Range(format!("entry ({i}, {j}) overflowed")));
                }
            }
        }
        Ok(())
    }

    /// Image `B x` of a vector.
    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: x.len(),
            });
        }
        Ok(self
            .rows()
            .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
            .collect())
    }

    /// `c(P) = d⁻¹ · min p_{ij} / max p_{ij}` for strictly positive `P`.
    ///
    /// With this constant, `c(P)‖L‖‖PR‖ ≤ ‖LPR‖ ≤ ‖L‖‖PR‖` for all
    /// non-negative `L`, `R`.
    pub fn elem_constant(&self) -> Result<f64> {
        if !self.is_positive() {
            return Err(Error::NotPositive);
        }
        let min = self.entries.iter().copied().fold(f64::INFINITY, f64::min);
        Ok(min / self.max_entry() / self.dim as f64)
    }

    /// Minimum cross-ratio `b_{ik} b_{js} / (b_{jk} b_{is})` over all index
    /// quadruples; zero when any entry is zero.
    pub fn phi(&self) -> Result<f64> {
        if !self.allowability().allowable() {
            return Err(Error::Domain("phi requires an allowable matrix".into()));
        }
        if !self.is_positive() {
            return Ok(0.0);
        }
        let d = self.dim;
        let b = |i: usize, j: usize| self.entries[i * d + j];
        let mut best = f64::INFINITY;
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    for s in 0..d {
                        let ratio = (b(i, k) * b(j, s)) / (b(j, k) * b(i, s));
                        best = best.min(ratio);
                    }
                }
            }
        }
        Ok(best)
    }

    /// Birkhoff contraction coefficient `(1 − √φ)/(1 + √φ)`.
    pub fn birkhoff_tau(&self) -> Result<f64> {
        let root = self.phi()?.sqrt();
        Ok((1.0 - root) / (1.0 + root))
    }
}

impl fmt::Debug for NonNegMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.rows()).finish()
    }
}

impl fmt::Display for NonNegMatrix {
    /// Dense row-major decimal text, one row per line.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in self.rows() {
            let line: Vec<String> = row.iter().map(|x| format!("{x:?}")).collect();
            writeln!(f, "{}", line.join(" "))?;
        }
        Ok(())
    }
}
