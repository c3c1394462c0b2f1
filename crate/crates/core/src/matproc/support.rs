use std::fmt;

use super::MAX_DIM;

/// Exact zero/nonzero shadow of a `d × d` non-negative matrix.
///
/// Row `i` is stored as a bitmask whose bit `j` is set when entry `(i, j)`
/// is structurally nonzero. Products are computed with boolean arithmetic
/// only, so structural decisions never depend on a float threshold.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SupportPattern {
    dim: usize,
    rows: Vec<u32>,
}

impl SupportPattern {
    pub fn empty(dim: usize) -> Self {
        debug_assert!((1..=MAX_DIM).contains(&dim));
        SupportPattern {
            dim,
            rows: vec![0; dim],
        }
    }

    pub fn full(dim: usize) -> Self {
        let mask = Self::row_mask(dim);
        SupportPattern {
            dim,
            rows: vec![mask; dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        SupportPattern {
            dim,
            rows: (0..dim).map(|i| 1u32 << i).collect(),
        }
    }

    /// Builds the pattern from a row-major predicate.
    pub fn from_fn(dim: usize, mut nonzero: impl FnMut(usize, usize) -> bool) -> Self {
        let rows = (0..dim)
            .map(|i| {
                (0..dim).fold(0u32, |acc, j| {
                    if nonzero(i, j) {
                        acc | (1 << j)
                    } else {
                        acc
                    }
                })
            })
            .collect();
        SupportPattern { dim, rows }
    }

    fn row_mask(dim: usize) -> u32 {
        if dim == 32 {
            u32::MAX
        } else {
            (1u32 << dim) - 1
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> bool {
        self.rows[row] & (1 << col) != 0
    }

    /// Boolean matrix product `self · other`.
    pub fn product(&self, other: &SupportPattern) -> SupportPattern {
        debug_assert_eq!(self.dim, other.dim);
        let rows = self
            .rows
            .iter()
            .map(|&row| {
                let mut out = 0u32;
                let mut bits = row;
                while bits != 0 {
                    let k = bits.trailing_zeros() as usize;
                    out |= other.rows[k];
                    bits &= bits - 1;
                }
                out
            })
            .collect();
        SupportPattern {
            dim: self.dim,
            rows,
        }
    }

    pub fn transpose(&self) -> SupportPattern {
        SupportPattern::from_fn(self.dim, |i, j| self.get(j, i))
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(|&r| r == 0)
    }

    /// Every entry is structurally nonzero.
    pub fn is_full(&self) -> bool {
        let mask = Self::row_mask(self.dim);
        self.rows.iter().all(|&r| r == mask)
    }

    pub fn row_allowable(&self) -> bool {
        self.rows.iter().all(|&r| r != 0)
    }

    pub fn column_allowable(&self) -> bool {
        let cols = self.rows.iter().fold(0u32, |acc, &r| acc | r);
        cols == Self::row_mask(self.dim)
    }

    pub fn count(&self) -> usize {
        self.rows.iter().map(|r| r.count_ones() as usize).sum()
    }
}

impl fmt::Debug for SupportPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SupportPattern[")?;
        for i in 0..self.dim {
            if i > 0 {
                write!(f, "|")?;
            }
            for j in 0..self.dim {
                write!(f, "{}", if self.get(i, j) { '1' } else { '0' })?;
            }
        }
        write!(f, "]")
    }
}
