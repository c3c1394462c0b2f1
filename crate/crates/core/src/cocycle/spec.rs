use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matproc::{log_norm_bounds_log, LogMatrix, NonNegMatrix};
use crate::symbolic::{Alphabet, FiniteWord, Symbol};

/// Largest number of depth-`r` words a table may index.
pub const MAX_TABLE_WORDS: usize = 1 << 24;

#[derive(Clone, Debug, PartialEq)]
struct PaletteEntry {
    log: LogMatrix,
    /// Kept when the factor was given in linear form, so that it
    /// serialises back exactly.
    linear: Option<NonNegMatrix>,
}

impl PaletteEntry {
    fn linear(m: NonNegMatrix) -> Self {
        PaletteEntry {
            log: LogMatrix::from(&m),
            linear: Some(m),
        }
    }

    fn log(m: LogMatrix) -> Self {
        PaletteEntry {
            log: m,
            linear: None,
        }
    }

    fn key(&self) -> Vec<u64> {
        self.log.log_entries().iter().map(|x| x.to_bits()).collect()
    }
}

/// A locally constant cocycle: `A(ω)` depends on `ω_0 ⋯ ω_{r−1}` only.
///
/// Distinct matrices are stored once in a palette; a dense table maps each
/// of the `m^r` words (read in base `m`, first symbol most significant) to
/// its palette slot.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSpec", into = "RawSpec")]
pub struct CocycleSpec {
    alphabet: Alphabet,
    depth: usize,
    dim: usize,
    palette: Vec<PaletteEntry>,
    table: Vec<u32>,
    declared_ell0: Option<usize>,
    log_min_nonzero: f64,
    log_max_entry: f64,
}

fn table_words(alphabet: usize, depth: usize) -> Result<usize> {
    if depth == 0 {
        return Err(Error::InvalidParameter("cocycle depth must be at least 1".into()));
    }
    alphabet
        .checked_pow(depth as u32)
        .filter(|&n| n <= MAX_TABLE_WORDS)
        .ok_or_else(|| {
            Error::InvalidParameter(format!(
                "{alphabet}^{depth} table words exceed the limit {MAX_TABLE_WORDS}"
            ))
        })
}

impl CocycleSpec {
    fn build(
        alphabet: usize,
        depth: usize,
        mut lookup: impl FnMut(&[Symbol]) -> Result<PaletteEntry>,
    ) -> Result<Self> {
        let a = Alphabet::new(alphabet)?;
        let words = table_words(alphabet, depth)?;
        let mut palette: Vec<PaletteEntry> = Vec::new();
        let mut slots: HashMap<Vec<u64>, u32> = HashMap::new();
        let mut table = Vec::with_capacity(words);
        let mut word = vec![0 as Symbol; depth];
        for index in 0..words {
            let mut rest = index;
            for slot in word.iter_mut().rev() {
                *slot = (rest % alphabet) as Symbol;
                rest /= alphabet;
            }
            let entry = lookup(&word)?;
            if let Some(first) = palette.first() {
                if entry.log.dim() != first.log.dim() {
                    return Err(Error::DimensionMismatch {
                        expected: first.log.dim(),
                        found: entry.log.dim(),
                    });
                }
            }
            let next = palette.len() as u32;
            let slot = *slots.entry(entry.key()).or_insert_with(|| {
                palette.push(entry);
                next
            });
            table.push(slot);
        }
        let dim = palette[0].log.dim();
        let log_min_nonzero = palette
            .iter()
            .filter_map(|p| p.log.log_min_nonzero())
            .fold(f64::INFINITY, f64::min);
        let log_max_entry = palette
            .iter()
            .filter_map(|p| p.log.log_max_entry())
            .fold(f64::NEG_INFINITY, f64::max);
        Ok(CocycleSpec {
            alphabet: a,
            depth,
            dim,
            palette,
            table,
            declared_ell0: None,
            log_min_nonzero,
            log_max_entry,
        })
    }

    /// Table from explicit `(word, matrix)` pairs, with `default` filling
    /// every word not listed. Fails if the map would not be total.
    pub fn new(
        alphabet: usize,
        depth: usize,
        entries: Vec<(FiniteWord, NonNegMatrix)>,
        default: Option<NonNegMatrix>,
    ) -> Result<Self> {
        let lookup = index_entries(alphabet, depth, entries, PaletteEntry::linear)?;
        let default = default.map(PaletteEntry::linear);
        Self::build(alphabet, depth, |w| {
            lookup
                .get(w)
                .or(default.as_ref())
                .cloned()
                .ok_or_else(|| missing(w))
        })
    }

    /// Depth-one cocycle `A(ω) = matrices[ω_0]`.
    pub fn first_coordinate(matrices: &[NonNegMatrix]) -> Result<Self> {
        if matrices.is_empty() {
            return Err(Error::InvalidParameter("no matrices given".into()));
        }
        Self::build(matrices.len(), 1, |w| {
            Ok(PaletteEntry::linear(matrices[w[0] as usize].clone()))
        })
    }

    /// Table computed word by word in the log domain.
    pub fn from_fn(
        alphabet: usize,
        depth: usize,
        mut f: impl FnMut(&[Symbol]) -> Result<LogMatrix>,
    ) -> Result<Self> {
        Self::build(alphabet, depth, |w| f(w).map(PaletteEntry::log))
    }

    /// Records a known positivity horizon `ℓ0`.
    pub fn with_ell0(mut self, ell0: usize) -> Self {
        self.declared_ell0 = Some(ell0);
        self
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn declared_ell0(&self) -> Option<usize> {
        self.declared_ell0
    }

    /// Distinct matrices of the table.
    pub fn palette(&self) -> impl Iterator<Item = &LogMatrix> {
        self.palette.iter().map(|p| &p.log)
    }

    pub fn palette_entry(&self, slot: usize) -> &LogMatrix {
        &self.palette[slot].log
    }

    /// Index of `window[..r]` in the table.
    pub fn word_index(&self, window: &[Symbol]) -> Result<usize> {
        if window.len() < self.depth {
            return Err(Error::InsufficientContext {
                required: self.depth,
                available: window.len(),
            });
        }
        let m = self.alphabet.size();
        window[..self.depth].iter().try_fold(0usize, |acc, &s| {
            if (s as usize) < m {
                Ok(acc * m + s as usize)
            } else {
                Err(Error::InvalidSymbol {
                    symbol: s as u32,
                    size: m,
                })
            }
        })
    }

    /// Palette slot of a word index; equal slots mean equal matrices.
    pub fn slot(&self, index: usize) -> usize {
        self.table[index] as usize
    }

    /// Factor for a precomputed word index; see [`CocycleSpec::word_index`].
    pub fn factor_at(&self, index: usize) -> &LogMatrix {
        &self.palette[self.table[index] as usize].log
    }

    /// `A(x)` for any `x` starting with `window`, in log form.
    pub fn factor(&self, window: &[Symbol]) -> Result<&LogMatrix> {
        Ok(self.factor_at(self.word_index(window)?))
    }

    /// `A(x)` for any `x` starting with `window`.
    pub fn evaluate(&self, window: &[Symbol]) -> Result<NonNegMatrix> {
        let slot = &self.palette[self.table[self.word_index(window)?] as usize];
        match &slot.linear {
            Some(m) => Ok(m.clone()),
            None => slot.log.to_matrix(),
        }
    }

    /// `log b` where `b` is the smallest structurally nonzero entry of the
    /// table; `+∞` if every matrix is zero.
    pub fn log_entry_floor(&self) -> f64 {
        self.log_min_nonzero
    }

    /// `b` itself; may be 0 if it is below the `f64` range.
    pub fn entry_floor(&self) -> f64 {
        self.log_min_nonzero.exp()
    }

    /// `log a^*`, the largest entry of the table.
    pub fn log_entry_ceiling(&self) -> f64 {
        self.log_max_entry
    }

    /// `(−cn, cn)` envelope for `log ‖A^{(n)}‖` of nonzero products.
    pub fn log_norm_envelope(&self, n: usize) -> (f64, f64) {
        log_norm_bounds_log(n, self.log_min_nonzero, self.log_max_entry, self.dim)
    }

    pub fn is_strictly_positive(&self) -> bool {
        self.palette.iter().all(|p| p.log.support().is_full())
    }

    /// `min c(A)` over the table, `c(P) = d⁻¹ min P / max P`; `None` unless
    /// every matrix is strictly positive.
    pub fn min_elem_constant(&self) -> Option<f64> {
        if !self.is_strictly_positive() {
            return None;
        }
        let d = self.dim as f64;
        self.palette
            .iter()
            .map(|p| {
                let lo = p.log.log_min_nonzero().unwrap();
                let hi = p.log.log_max_entry().unwrap();
                (lo - hi).exp() / d
            })
            .min_by(f64::total_cmp)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(&RawSpec::from(self)).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let raw: RawSpec = toml::from_str(text)?;
        CocycleSpec::try_from(raw)
    }
}

fn missing(w: &[Symbol]) -> Error {
    Error::InvalidParameter(format!(
        "word {} has no matrix and no default is set",
        FiniteWord::from(w)
    ))
}

fn index_entries<T>(
    alphabet: usize,
    depth: usize,
    entries: Vec<(FiniteWord, T)>,
    wrap: impl Fn(T) -> PaletteEntry,
) -> Result<HashMap<FiniteWord, PaletteEntry>> {
    let a = Alphabet::new(alphabet)?;
    let mut out = HashMap::new();
    for (word, m) in entries {
        if word.len() != depth {
            return Err(Error::InvalidParameter(format!(
                "table word {word} has length {} but depth is {depth}",
                word.len()
            )));
        }
        a.check_word(&word)?;
        if out.insert(word.clone(), wrap(m)).is_some() {
            return Err(Error::InvalidParameter(format!("table word {word} listed twice")));
        }
    }
    Ok(out)
}

/// Text form of a table.
///
/// ```toml
/// alphabet = 2
/// depth = 1
/// ell0 = 1            # optional
///
/// [default]          # optional, fills unlisted words
/// matrix = [[1.0, 1.0], [1.0, 1.0]]
///
/// [[entries]]
/// word = "0"
/// matrix = [[1.0, 1.0], [1.0, 0.0]]
///
/// [[entries]]
/// word = "1"
/// log_matrix = [[0.0, -inf], [-1e5, 0.0]]   # natural logs of entries
/// ```
#[derive(Serialize, Deserialize)]
struct RawSpec {
    alphabet: usize,
    depth: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    ell0: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    default: Option<RawMatrix>,
    #[serde(default)]
    entries: Vec<RawEntry>,
}

#[derive(Serialize, Deserialize)]
struct RawEntry {
    word: FiniteWord,
    #[serde(flatten)]
    matrix: RawMatrix,
}

#[derive(Serialize, Deserialize)]
struct RawMatrix {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    matrix: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    log_matrix: Option<Vec<Vec<f64>>>,
}

impl RawMatrix {
    fn from_entry(p: &PaletteEntry) -> Self {
        let d = p.log.dim();
        let rows = |v: &[f64]| v.chunks(d).map(|r| r.to_vec()).collect::<Vec<_>>();
        match &p.linear {
            Some(m) => RawMatrix {
                matrix: Some(rows(m.entries())),
                log_matrix: None,
            },
            None => RawMatrix {
                matrix: None,
                log_matrix: Some(rows(p.log.log_entries())),
            },
        }
    }

    fn into_entry(self) -> Result<PaletteEntry> {
        match (self.matrix, self.log_matrix) {
            (Some(rows), None) => Ok(PaletteEntry::linear(NonNegMatrix::from_rows(&rows)?)),
            (None, Some(rows)) => {
                let d = rows.len();
                if rows.iter().any(|r| r.len() != d) {
                    return Err(Error::InvalidMatrix("log_matrix is not square".into()));
                }
                Ok(PaletteEntry::log(LogMatrix::from_log_entries(d, rows.concat())?))
            }
            _ => Err(Error::Config(
                "each table entry needs exactly one of `matrix` or `log_matrix`".into(),
            )),
        }
    }
}

impl From<&CocycleSpec> for RawSpec {
    /// The most frequent matrix becomes the default; every other word is
    /// listed.
    fn from(spec: &CocycleSpec) -> Self {
        let m = spec.alphabet.size();
        let mut counts = vec![0usize; spec.palette.len()];
        for &slot in &spec.table {
            counts[slot as usize] += 1;
        }
        let common = (0..counts.len()).max_by_key(|&s| (counts[s], std::cmp::Reverse(s)));
        let common = common.filter(|&s| counts[s] > 1);
        let entries = spec
            .table
            .iter()
            .enumerate()
            .filter(|&(_, &slot)| Some(slot as usize) != common)
            .map(|(index, &slot)| {
                let mut word = vec![0; spec.depth];
                let mut rest = index;
                for s in word.iter_mut().rev() {
                    *s = (rest % m) as Symbol;
                    rest /= m;
                }
                RawEntry {
                    word: FiniteWord::new(word),
                    matrix: RawMatrix::from_entry(&spec.palette[slot as usize]),
                }
            })
            .collect();
        RawSpec {
            alphabet: m,
            depth: spec.depth,
            ell0: spec.declared_ell0,
            default: common.map(|s| RawMatrix::from_entry(&spec.palette[s])),
            entries,
        }
    }
}

impl From<CocycleSpec> for RawSpec {
    fn from(spec: CocycleSpec) -> Self {
        RawSpec::from(&spec)
    }
}

impl TryFrom<RawSpec> for CocycleSpec {
    type Error = Error;

    fn try_from(raw: RawSpec) -> Result<Self> {
        let entries = raw
            .entries
            .into_iter()
            .map(|e| Ok((e.word, e.matrix.into_entry()?)))
            .collect::<Result<Vec<_>>>()?;
        let lookup = index_entries(raw.alphabet, raw.depth, entries, |p| p)?;
        let default = raw.default.map(RawMatrix::into_entry).transpose()?;
        let spec = Self::build(raw.alphabet, raw.depth, |w| {
            lookup
                .get(w)
                .or(default.as_ref())
                .cloned()
                .ok_or_else(|| missing(w))
        })?;
        Ok(match raw.ell0 {
            Some(l) => spec.with_ell0(l),
            None => spec,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[f64]]) -> NonNegMatrix {
        NonNegMatrix::from_rows(rows).unwrap()
    }

    #[test]
    fn depth_two_lookup() {
        let a = m(&[&[1.0, 0.0], &[0.0, 1.0]]);
        let b = m(&[&[2.0, 1.0], &[1.0, 1.0]]);
        let spec = CocycleSpec::new(2, 2, vec![("10".parse().unwrap(), b.clone())], Some(a.clone()))
            .unwrap();
        assert_eq!(spec.evaluate(&[1, 0, 1, 1]).unwrap(), b);
        assert_eq!(spec.evaluate(&[0, 1]).unwrap(), a);
        assert_eq!(spec.evaluate(&[1, 0]).unwrap(), spec.evaluate(&[1, 0, 0]).unwrap());
        assert_eq!(
            spec.evaluate(&[1]),
            Err(Error::InsufficientContext {
                required: 2,
                available: 1
            })
        );
        assert_eq!(spec.palette().count(), 2);
    }

    #[test]
    fn table_must_be_total() {
        let a = NonNegMatrix::ones(2);
        assert!(CocycleSpec::new(2, 1, vec![("0".parse().unwrap(), a)], None).is_err());
    }

    #[test]
    fn dims_must_agree() {
        let r = CocycleSpec::first_coordinate(&[NonNegMatrix::ones(2), NonNegMatrix::ones(3)]);
        assert!(matches!(r, Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn floor_and_ceiling() {
        let spec = CocycleSpec::first_coordinate(&[
            m(&[&[10.0, 0.0], &[0.0, 0.1]]),
            m(&[&[0.0, 1.0], &[1.0, 0.0]]),
        ])
        .unwrap();
        assert!((spec.entry_floor() - 0.1).abs() < 1e-15);
        assert!((spec.log_entry_ceiling() - 10f64.ln()).abs() < 1e-15);
        assert!(!spec.is_strictly_positive());
        assert_eq!(spec.min_elem_constant(), None);
    }

    #[test]
    fn toml_round_trip() {
        let spec = CocycleSpec::first_coordinate(&[
            m(&[&[1.0, 1.0], &[1.0, 0.0]]),
            m(&[&[0.5, 0.0], &[3.0, 1e-300]]),
        ])
        .unwrap()
        .with_ell0(2);
        let back = CocycleSpec::from_toml(&spec.to_toml().unwrap()).unwrap();
        assert_eq!(back, spec);

        let tiny = CocycleSpec::from_fn(2, 1, |w| {
            LogMatrix::from_log_entries(1, vec![-1e5 * (w[0] as f64 + 1.0)])
        })
        .unwrap();
        assert_eq!(CocycleSpec::from_toml(&tiny.to_toml().unwrap()).unwrap(), tiny);
    }

    #[test]
    fn hand_written_toml() {
        let text = r#"
alphabet = 2
depth = 1

[default]
matrix = [[1.0, 1.0], [1.0, 1.0]]

[[entries]]
word = "1"
log_matrix = [[0.0, -inf], [-inf, 0.0]]
"#;
        let spec = CocycleSpec::from_toml(text).unwrap();
        assert_eq!(spec.evaluate(&[0]).unwrap(), NonNegMatrix::ones(2));
        assert_eq!(spec.evaluate(&[1]).unwrap(), NonNegMatrix::identity(2));
    }
}
