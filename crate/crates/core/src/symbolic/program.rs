//! Block programs: infinite words built as `head · B_{j0} · B_{j0+1} · …`
//! where each block `B_j` is a concatenation of parts whose lengths follow
//! rules in `j`, and where parts may be switched on or off by the epoch
//! that `j` falls into.

use serde::{Deserialize, Serialize};

use super::source::InfiniteWordSource;
use super::word::FiniteWord;
use crate::error::{Error, Result};

/// How block indices are grouped into epochs `e = 0, 1, 2, …`.
///
/// Even epochs are "first type", odd epochs "second type".
#[derive(Clone, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EpochSchedule {
    /// Epoch `e` is `2^{2^e} ≤ j < 2^{2^{e+1}}`; indices `j < 2` are in epoch 0.
    #[default]
    DoublyExponential,
    /// Epoch `e` is `base^e ≤ j < base^{e+1}`; `j = 0` is in epoch 0.
    Geometric { base: u64 },
}

impl EpochSchedule {
    pub fn validate(&self) -> Result<()> {
        match self {
            EpochSchedule::Geometric { base } if *base < 2 => Err(Error::InvalidProgram(format!(
                "geometric epoch base {base} must be at least 2"
            ))),
            _ => Ok(()),
        }
    }

    pub fn epoch(&self, j: u64) -> u32 {
        match *self {
            EpochSchedule::DoublyExponential => {
                if j < 2 {
                    0
                } else {
                    let log = 63 - j.leading_zeros();
                    31 - log.leading_zeros()
                }
            }
            EpochSchedule::Geometric { base } => {
                let mut e = 0;
                let mut threshold = base;
                while threshold <= j {
                    e += 1;
                    threshold = match threshold.checked_mul(base) {
                        Some(t) => t,
                        None => break,
                    };
                }
                e
            }
        }
    }

    /// First block index of epoch `e`, if representable.
    pub fn epoch_start(&self, e: u32) -> Option<u64> {
        match *self {
            EpochSchedule::DoublyExponential => match e {
                0 => Some(0),
                _ => 1u64.checked_shl(1u32.checked_shl(e)?),
            },
            EpochSchedule::Geometric { base } => match e {
                0 => Some(0),
                _ => base.checked_pow(e),
            },
        }
    }

    pub fn is_second_type(&self, j: u64) -> bool {
        self.epoch(j) % 2 == 1
    }
}

/// Restricts a part to blocks of one epoch type.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EpochFilter {
    #[default]
    Always,
    /// Only in even epochs.
    First,
    /// Only in odd epochs.
    Second,
}

/// Integer-valued function of the block index.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum LengthRule {
    /// `j`
    Index,
    /// `value`
    Constant { value: u64 },
    /// `mul·j + add`
    Affine { mul: u64, add: u64 },
    /// `base^j`
    Power { base: u64 },
    /// `⌈log₂(base^j)⌉`
    Log2Power { base: u64 },
    /// `2^{2^{2^j}}`
    Tower,
    /// `2^{2^j}`, the base-2 logarithm of [`LengthRule::Tower`].
    Log2Tower,
}

impl LengthRule {
    pub fn eval(&self, j: u64) -> Result<u64> {
        let overflow = || Error::InvalidProgram(format!("length rule {self:?} overflows at j={j}"));
        let pow2 = |e: u64| -> Option<u64> { 1u64.checked_shl(u32::try_from(e).ok()?) };
        match *self {
            LengthRule::Index => Ok(j),
            LengthRule::Constant { value } => Ok(value),
            LengthRule::Affine { mul, add } => mul
                .checked_mul(j)
                .and_then(|x| x.checked_add(add))
                .ok_or_else(overflow),
            LengthRule::Power { base } => u32::try_from(j)
                .ok()
                .and_then(|e| base.checked_pow(e))
                .ok_or_else(overflow),
            LengthRule::Log2Power { base } => {
                if base == 0 {
                    return Err(Error::InvalidProgram("log2 of 0^j".into()));
                }
                if base.is_power_of_two() {
                    return (base.trailing_zeros() as u64)
                        .checked_mul(j)
                        .ok_or_else(overflow);
                }
                // ⌈log₂ n⌉ of n = base^j, exact while n fits in 128 bits
                let n = u32::try_from(j)
                    .ok()
                    .and_then(|e| (base as u128).checked_pow(e))
                    .ok_or_else(overflow)?;
                Ok(if n <= 1 {
                    0
                } else {
                    128 - (n - 1).leading_zeros() as u64
                })
            }
            LengthRule::Tower => pow2(j)
                .and_then(pow2)
                .and_then(pow2)
                .ok_or_else(overflow),
            LengthRule::Log2Tower => pow2(j).and_then(pow2).ok_or_else(overflow),
        }
    }
}

/// One piece of a block.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BlockPart {
    Literal {
        word: FiniteWord,
        #[serde(default)]
        epoch: EpochFilter,
    },
    /// `word` repeated `count(j)` times.
    Repeat {
        word: FiniteWord,
        count: LengthRule,
        #[serde(default)]
        epoch: EpochFilter,
    },
    /// The first `length(j)` symbols of another source.
    SourcePrefix {
        source: Box<InfiniteWordSource>,
        length: LengthRule,
        #[serde(default)]
        epoch: EpochFilter,
    },
}

impl BlockPart {
    pub fn epoch_filter(&self) -> EpochFilter {
        match self {
            BlockPart::Literal { epoch, .. }
            | BlockPart::Repeat { epoch, .. }
            | BlockPart::SourcePrefix { epoch, .. } => *epoch,
        }
    }

    fn active(&self, schedule: &EpochSchedule, j: u64) -> bool {
        match self.epoch_filter() {
            EpochFilter::Always => true,
            EpochFilter::First => !schedule.is_second_type(j),
            EpochFilter::Second => schedule.is_second_type(j),
        }
    }

    fn length(&self, j: u64) -> Result<u64> {
        match self {
            BlockPart::Literal { word, .. } => Ok(word.len() as u64),
            BlockPart::Repeat { word, count, .. } => count
                .eval(j)?
                .checked_mul(word.len() as u64)
                .ok_or_else(|| Error::InvalidProgram(format!("block {j} length overflows"))),
            BlockPart::SourcePrefix { length, .. } => length.eval(j),
        }
    }
}

fn default_first_index() -> u64 {
    1
}

/// `head · B_{first_index} · B_{first_index+1} · …`
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockProgram {
    #[serde(default)]
    pub head: FiniteWord,
    #[serde(default = "default_first_index")]
    pub first_index: u64,
    #[serde(default)]
    pub schedule: EpochSchedule,
    pub parts: Vec<BlockPart>,
}

impl BlockProgram {
    pub fn validate(&self, alphabet: usize) -> Result<()> {
        self.schedule.validate()?;
        if self.parts.is_empty() {
            return Err(Error::InvalidProgram("block program has no parts".into()));
        }
        let check = |w: &FiniteWord| {
            super::Alphabet::new(alphabet)?
                .check_word(w)
                .map_err(|e| Error::InvalidProgram(e.to_string()))
        };
        check(&self.head)?;
        for part in &self.parts {
            match part {
                BlockPart::Literal { word, .. } | BlockPart::Repeat { word, .. } => check(word)?,
                BlockPart::SourcePrefix { source, .. } => {
                    if source.alphabet().size() > alphabet {
                        return Err(Error::InvalidProgram(format!(
                            "sub-source alphabet {} exceeds program alphabet {alphabet}",
                            source.alphabet().size()
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// `|B_j|`, computed from the rules without generating symbols.
    pub fn block_length(&self, j: u64) -> Result<u64> {
        let mut total = 0u64;
        for part in &self.parts {
            if part.active(&self.schedule, j) {
                total = total
                    .checked_add(part.length(j)?)
                    .ok_or_else(|| Error::InvalidProgram(format!("block {j} length overflows")))?;
            }
        }
        if total == 0 {
            return Err(Error::InvalidProgram(format!("block {j} is empty")));
        }
        Ok(total)
    }

    pub(crate) fn is_active(&self, part: &BlockPart, j: u64) -> bool {
        part.active(&self.schedule, j)
    }

    /// Position at which block `j` starts.
    pub fn block_start(&self, j: u64) -> Result<u64> {
        let mut pos = self.head.len() as u64;
        for i in self.first_index..j {
            pos = pos
                .checked_add(self.block_length(i)?)
                .ok_or_else(|| Error::InvalidProgram("position overflows".into()))?;
        }
        Ok(pos)
    }

    /// `ω = 3 u_1 v_1 u_2 v_2 ⋯` over `{0,1,2,3}` with `u_j = v_j = x_1⋯x_j`
    /// in first-type epochs and `x_1⋯x_j 2` in second-type epochs.
    pub fn nolimit(x: InfiniteWordSource, schedule: EpochSchedule) -> BlockProgram {
        let half = [
            BlockPart::SourcePrefix {
                source: Box::new(x),
                length: LengthRule::Index,
                epoch: EpochFilter::Always,
            },
            BlockPart::Literal {
                word: FiniteWord::new(vec![2]),
                epoch: EpochFilter::Second,
            },
        ];
        BlockProgram {
            head: FiniteWord::new(vec![3]),
            first_index: 1,
            schedule,
            parts: half.iter().chain(half.iter()).cloned().collect(),
        }
    }

    /// `z = u_1 v_1 u_2 v_2 ⋯` with `u_j = x_0⋯x_{j−1}`, `v_j = y_0⋯y_{j−1}`.
    pub fn gap(x: InfiniteWordSource, y: InfiniteWordSource) -> BlockProgram {
        BlockProgram {
            head: FiniteWord::empty(),
            first_index: 1,
            schedule: EpochSchedule::default(),
            parts: vec![
                BlockPart::SourcePrefix {
                    source: Box::new(x),
                    length: LengthRule::Index,
                    epoch: EpochFilter::Always,
                },
                BlockPart::SourcePrefix {
                    source: Box::new(y),
                    length: LengthRule::Index,
                    epoch: EpochFilter::Always,
                },
            ],
        }
    }

    /// Four-letter non-ergodic construction `u_1 v_1 w_1 u_2 v_2 w_2 ⋯` with
    /// `u_j = 0^j`, `v_j = 1^j`, `w_j = 2^j`, and a trailing `3` after `u_j`
    /// and `v_j` in second-type epochs.
    pub fn nonergodic_four(schedule: EpochSchedule) -> BlockProgram {
        let run = |s: u8| BlockPart::Repeat {
            word: FiniteWord::new(vec![s]),
            count: LengthRule::Index,
            epoch: EpochFilter::Always,
        };
        let swap = || BlockPart::Literal {
            word: FiniteWord::new(vec![3]),
            epoch: EpochFilter::Second,
        };
        BlockProgram {
            head: FiniteWord::empty(),
            first_index: 1,
            schedule,
            parts: vec![run(0), swap(), run(1), swap(), run(2)],
        }
    }

    /// `(01)^{n_i} 0^{n_i'}` blocks for `i = 1, 2, …`.
    pub fn alternating_zeros(n: LengthRule, n_prime: LengthRule) -> BlockProgram {
        BlockProgram {
            head: FiniteWord::empty(),
            first_index: 1,
            schedule: EpochSchedule::default(),
            parts: vec![
                BlockPart::Repeat {
                    word: FiniteWord::new(vec![0, 1]),
                    count: n,
                    epoch: EpochFilter::Always,
                },
                BlockPart::Repeat {
                    word: FiniteWord::new(vec![0]),
                    count: n_prime,
                    epoch: EpochFilter::Always,
                },
            ],
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn doubly_exponential_epochs() {
        let s = EpochSchedule::DoublyExponential;
        let epochs: Vec<u32> = [0, 1, 2, 3, 4, 15, 16, 255, 256, 65535, 65536]
            .iter()
            .map(|&j| s.epoch(j))
            .collect();
        assert_eq!(epochs, [0, 0, 0, 0, 1, 1, 2, 2, 3, 3, 4]);
        assert_eq!(s.epoch_start(2), Some(16));
        assert_eq!(s.epoch_start(6), None);
    }

    #[test]
    fn geometric_epochs() {
        let s = EpochSchedule::Geometric { base: 4 };
        let epochs: Vec<u32> = [0, 1, 3, 4, 15, 16, 63, 64].iter().map(|&j| s.epoch(j)).collect();
        assert_eq!(epochs, [0, 0, 0, 1, 1, 2, 2, 3]);
        assert!(s.is_second_type(5) && !s.is_second_type(20));
        assert!(EpochSchedule::Geometric { base: 1 }.validate().is_err());
    }

    #[test]
    fn length_rules() {
        assert_eq!(LengthRule::Power { base: 4 }.eval(3).unwrap(), 64);
        assert_eq!(LengthRule::Log2Power { base: 4 }.eval(3).unwrap(), 6);
        assert_eq!(LengthRule::Log2Power { base: 3 }.eval(2).unwrap(), 4);
        assert_eq!(LengthRule::Tower.eval(1).unwrap(), 16);
        assert_eq!(LengthRule::Tower.eval(2).unwrap(), 65536);
        assert!(LengthRule::Tower.eval(3).is_err());
        assert_eq!(LengthRule::Log2Tower.eval(3).unwrap(), 256);
        assert_eq!(LengthRule::Affine { mul: 2, add: 1 }.eval(5).unwrap(), 11);
    }

    #[test]
    fn empty_block_is_rejected() {
        let p = BlockProgram {
            head: FiniteWord::empty(),
            first_index: 0,
            schedule: EpochSchedule::default(),
            parts: vec![BlockPart::Repeat {
                word: FiniteWord::new(vec![1]),
                count: LengthRule::Index,
                epoch: EpochFilter::Always,
            }],
        };
        assert!(matches!(p.block_length(0), Err(Error::InvalidProgram(_))));
        assert_eq!(p.block_length(3).unwrap(), 3);
    }
}
