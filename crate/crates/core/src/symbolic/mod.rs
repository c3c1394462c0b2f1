//! Infinite words over finite alphabets: sources, occurrence search,
//! return-word decompositions and empirical frequencies.

mod matcher;
mod program;
mod returns;
mod source;
mod word;

use std::path::Path;

pub use matcher::{occurrences, Matcher};
pub use program::{BlockPart, BlockProgram, EpochFilter, EpochSchedule, LengthRule};
pub use returns::{
    decompose_returns, empirical_frequency, long_word_mass, return_rate_trace, ReturnDecomposition,
};
pub use source::{InfiniteWordSource, SourceKind, SymbolStream};
pub use word::{Alphabet, FiniteWord, Symbol};

use crate::error::Result;

/// Writes a prefix as raw bytes, one symbol per byte.
pub fn write_prefix_bytes(path: impl AsRef<Path>, prefix: &[Symbol]) -> Result<()> {
    std::fs::write(path, prefix)?;
    Ok(())
}

/// Reads a raw-byte prefix, checking every symbol against `alphabet`.
pub fn read_prefix_bytes(path: impl AsRef<Path>, alphabet: Alphabet) -> Result<FiniteWord> {
    let bytes = std::fs::read(path)?;
    alphabet.check_word(&bytes)?;
    Ok(FiniteWord::new(bytes))
}
