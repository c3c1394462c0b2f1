use std::borrow::Borrow;
use std::fmt;
use std::ops::Deref;
use std::str::FromStr;

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A letter of the alphabet `{0, …, m−1}`; alphabets hold at most 256 symbols
/// so that prefixes export one symbol per byte.
pub type Symbol = u8;

/// Alphabet `{0, …, size−1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "usize", into = "usize")]
pub struct Alphabet {
    size: usize,
}

impl Alphabet {
    pub const MAX_SIZE: usize = 256;

    pub fn new(size: usize) -> Result<Self> {
        if size == 0 || size > Self::MAX_SIZE {
            return Err(Error::InvalidParameter(format!(
                "alphabet size {size} outside 1..={}",
                Self::MAX_SIZE
            )));
        }
        Ok(Alphabet { size })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn contains(&self, symbol: Symbol) -> bool {
        (symbol as usize) < self.size
    }

    pub fn check_word(&self, word: &[Symbol]) -> Result<()> {
        match word.iter().find(|&&s| !self.contains(s)) {
            Some(&s) => Err(Error::InvalidSymbol {
                symbol: s as u32,
                size: self.size,
            }),
            None => Ok(()),
        }
    }

    /// All words of the given length in lexicographic order.
    pub fn words(&self, len: usize) -> impl Iterator<Item = FiniteWord> + '_ {
        let total = self.size.checked_pow(len as u32).unwrap_or(usize::MAX);
        (0..total).map(move |mut index| {
            let mut w = vec![0; len];
            for slot in w.iter_mut().rev() {
                *slot = (index % self.size) as Symbol;
                index /= self.size;
            }
            FiniteWord(w)
        })
    }
}

impl TryFrom<usize> for Alphabet {
    type Error = Error;
    fn try_from(size: usize) -> Result<Self> {
        Alphabet::new(size)
    }
}

impl From<Alphabet> for usize {
    fn from(a: Alphabet) -> usize {
        a.size
    }
}

/// A finite word; the empty word is allowed.
///
/// Text form: a string of decimal digits when every symbol is below 10
/// (`"0110"`), otherwise a list of integers.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FiniteWord(Vec<Symbol>);

impl FiniteWord {
    pub fn new(symbols: Vec<Symbol>) -> Self {
        FiniteWord(symbols)
    }

    pub fn empty() -> Self {
        FiniteWord(Vec::new())
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<Symbol> {
        self.0
    }

    /// `self` repeated `times` times.
    pub fn repeat(&self, times: usize) -> FiniteWord {
        FiniteWord(self.0.repeat(times))
    }

    pub fn concat(&self, other: &[Symbol]) -> FiniteWord {
        let mut v = self.0.clone();
        v.extend_from_slice(other);
        FiniteWord(v)
    }
}

impl Deref for FiniteWord {
    type Target = [Symbol];
    fn deref(&self) -> &[Symbol] {
        &self.0
    }
}

impl Borrow<[Symbol]> for FiniteWord {
    fn borrow(&self) -> &[Symbol] {
        &self.0
    }
}

impl From<Vec<Symbol>> for FiniteWord {
    fn from(v: Vec<Symbol>) -> Self {
        FiniteWord(v)
    }
}

impl From<&[Symbol]> for FiniteWord {
    fn from(v: &[Symbol]) -> Self {
        FiniteWord(v.to_vec())
    }
}

impl FromStr for FiniteWord {
    type Err = Error;

    /// Parses a digit string (`"0110"`) or a comma-separated list (`"3,12,0"`).
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Config(format!("cannot parse word {s:?}"));
        if s.contains(',') {
            s.split(',')
                .map(|t| t.trim().parse::<Symbol>().map_err(|_| bad()))
                .collect::<Result<Vec<_>>>()
                .map(FiniteWord)
        } else {
            s.chars()
                .map(|c| c.to_digit(10).map(|d| d as Symbol).ok_or_else(bad))
                .collect::<Result<Vec<_>>>()
                .map(FiniteWord)
        }
    }
}

impl fmt::Display for FiniteWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.iter().all(|&s| s < 10) {
            for s in &self.0 {
                write!(f, "{s}")?;
            }
            Ok(())
        } else {
            let parts: Vec<String> = self.0.iter().map(|s| s.to_string()).collect();
            write!(f, "{}", parts.join(","))
        }
    }
}

impl fmt::Debug for FiniteWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "\"{self}\"")
    }
}

impl Serialize for FiniteWord {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        if self.0.iter().all(|&s| s < 10) {
            serializer.collect_str(self)
        } else {
            self.0.serialize(serializer)
        }
    }
}

impl<'de> Deserialize<'de> for FiniteWord {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct WordVisitor;

        impl<'de> Visitor<'de> for WordVisitor {
            type Value = FiniteWord;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a digit string or a list of symbols")
            }

            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<FiniteWord, E> {
                v.parse().map_err(E::custom)
            }

            fn visit_seq<A: de::SeqAccess<'de>>(
                self,
                mut seq: A,
            ) -> std::result::Result<FiniteWord, A::Error> {
                let mut out = Vec::new();
                while let Some(s) = seq.next_element::<Symbol>()? {
                    out.push(s);
                }
                Ok(FiniteWord(out))
            }
        }

        deserializer.deserialize_any(WordVisitor)
    }
}
