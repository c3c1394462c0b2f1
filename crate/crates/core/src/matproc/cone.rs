use super::NonNegMatrix;
use crate::error::{Error, Result};

/// A point in the open positive cone.
#[derive(Clone, Debug, PartialEq)]
pub struct ConeVector(Vec<f64>);

impl ConeVector {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::Domain("cone vector must be non-empty".into()));
        }
        if let Some(bad) = coords.iter().find(|x| !(x.is_finite() && **x > 0.0)) {
            return Err(Error::Domain(format!(
                "coordinate {bad} is not strictly positive"
            )));
        }
        Ok(ConeVector(coords))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    /// `B x`; stays in the open cone when `B` is row-allowable.
    pub fn mapped_by(&self, matrix: &NonNegMatrix) -> Result<ConeVector> {
        if !matrix.support().row_allowable() {
            return Err(Error::Domain(
                "only row-allowable matrices preserve the open cone".into(),
            ));
        }
        ConeVector::new(matrix.apply(&self.0)?)
    }
}

/// Hilbert projective metric `log(max_i(x_i/y_i) / min_i(x_i/y_i))`.
pub fn hilbert_metric(x: &ConeVector, y: &ConeVector) -> Result<f64> {
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch {
            expected: x.dim(),
            found: y.dim(),
        });
    }
    let (lo, hi) = x
        .0
        .iter()
        .zip(&y.0)
        .map(|(a, b)| a / b)
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), r| (lo.min(r), hi.max(r)));
    Ok((hi / lo).ln())
}
