//! Text and binary encodings of [`NonNegMatrix`].
//!
//! Text: one row per line, entries separated by ASCII whitespace, written
//! with the shortest decimal form that round-trips. Blank lines and lines
//! starting with `#` are ignored when parsing.
//!
//! Binary, all integers and floats little-endian:
//!
//! ```text
//! offset 0        u32   d
//! offset 4        f64   d*d entries, row-major
//! offset 4+8d²    u8    ceil(d²/8) support bytes; entry k = i*d + j is
//!                       bit (k % 8) of byte (k / 8), least significant first
//! ```
//!
//! Decoding rejects a bitmap that disagrees with the entries.

use super::{NonNegMatrix, SupportPattern};
use crate::error::{Error, Result};

pub fn to_text(matrix: &NonNegMatrix) -> String {
    matrix.to_string()
}

pub fn from_text(text: &str) -> Result<NonNegMatrix> {
    let mut rows = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let row = line
            .split_ascii_whitespace()
            .map(|tok| {
                tok.parse::<f64>()
                    .map_err(|e| Error::InvalidMatrix(format!("bad entry {tok:?}: {e}")))
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    NonNegMatrix::from_rows(&rows)
}

pub fn to_bytes(matrix: &NonNegMatrix) -> Vec<u8> {
    let d = matrix.dim();
    let mut out = Vec::with_capacity(4 + 8 * d * d + (d * d).div_ceil(8));
    out.extend_from_slice(&(d as u32).to_le_bytes());
    for x in matrix.entries() {
        out.extend_from_slice(&x.to_le_bytes());
    }
    let mut bitmap = vec![0u8; (d * d).div_ceil(8)];
    let support = matrix.support();
    for i in 0..d {
        for j in 0..d {
            if support.get(i, j) {
                let k = i * d + j;
                bitmap[k / 8] |= 1 << (k % 8);
            }
        }
    }
    out.extend_from_slice(&bitmap);
    out
}

pub fn from_bytes(bytes: &[u8]) -> Result<NonNegMatrix> {
    let short = || Error::InvalidMatrix("truncated binary matrix".into());
    let header: [u8; 4] = bytes.get(..4).ok_or_else(short)?.try_into().unwrap();
    let d = u32::from_le_bytes(header) as usize;
    super::matrix::check_dim(d)?;
    let n = d * d;
    let expected_len = 4 + 8 * n + n.div_ceil(8);
    if bytes.len() != expected_len {
        return Err(Error::InvalidMatrix(format!(
            "binary matrix of dimension {d} must be {expected_len} bytes, got {}",
            bytes.len()
        )));
    }
    let entries: Vec<f64> = bytes[4..4 + 8 * n]
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    let bitmap = &bytes[4 + 8 * n..];
    let matrix = NonNegMatrix::new(d, entries)?;
    let declared = SupportPattern::from_fn(d, |i, j| {
        let k = i * d + j;
        bitmap[k / 8] & (1 << (k % 8)) != 0
    });
    if &declared != matrix.support() {
        return Err(Error::InvalidMatrix(
            "support bitmap disagrees with entries".into(),
        ));
    }
    Ok(matrix)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn binary_layout_is_exact() {
        let m = NonNegMatrix::from_rows(&[[1.0, 0.0], [0.0, 2.0]]).unwrap();
        let bytes = to_bytes(&m);
        assert_eq!(bytes.len(), 4 + 32 + 1);
        assert_eq!(&bytes[..4], &[2, 0, 0, 0]);
        assert_eq!(&bytes[4..12], &1.0f64.to_le_bytes());
        assert_eq!(bytes[36], 0b1001);
    }

    #[test]
    fn corrupted_bitmap_is_rejected() {
        let m = NonNegMatrix::ones(2);
        let mut bytes = to_bytes(&m);
        *bytes.last_mut().unwrap() = 0b0111;
        assert!(from_bytes(&bytes).is_err());
        assert!(from_bytes(&bytes[..10]).is_err());
    }

    #[test]
    fn text_ignores_comments() {
        let m = from_text("# fibonacci\n1 1\n\n1 0\n").unwrap();
        assert_eq!(m.entries(), &[1.0, 1.0, 1.0, 0.0]);
        assert!(from_text("1 2\n3\n").is_err());
    }

    fn matrix_strategy() -> impl Strategy<Value = NonNegMatrix> {
        (1usize..=5).prop_flat_map(|d| {
            proptest::collection::vec(
                prop_oneof![Just(0.0), 1e-300f64..1e300],
                d * d,
            )
            .prop_map(move |e| NonNegMatrix::new(d, e).unwrap())
        })
    }

    proptest! {
        #[test]
        fn both_encodings_round_trip(m in matrix_strategy()) {
            prop_assert_eq!(&from_bytes(&to_bytes(&m)).unwrap(), &m);
            prop_assert_eq!(&from_text(&to_text(&m)).unwrap(), &m);
        }
    }
}
