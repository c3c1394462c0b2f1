use super::matcher::occurrences;
use super::word::{FiniteWord, Symbol};
use crate::error::{Error, Result};

/// `ω = ζ_0 ζ_1 ⋯ ζ_i · remainder` cut at the return times of a prefix of ω
/// into the cylinder `[v]`.
///
/// Return times are the positions `k ≥ 1` where `v` occurs, so `ζ_0` is
/// never empty. The tail after the last return time is kept apart as the
/// remainder because the word starting there has not closed yet.
#[derive(Clone, Debug)]
pub struct ReturnDecomposition<'a> {
    prefix: &'a [Symbol],
    marker: FiniteWord,
    return_times: Vec<usize>,
}

/// Cuts `prefix` at its returns to `[marker]`.
pub fn decompose_returns<'a>(
    prefix: &'a [Symbol],
    marker: &[Symbol],
) -> Result<ReturnDecomposition<'a>> {
    if marker.is_empty() {
        return Err(Error::InvalidParameter("marker word is empty".into()));
    }
    let return_times = occurrences(prefix, marker, 1);
    if return_times.is_empty() {
        return Err(Error::MarkerNotFound {
            horizon: prefix.len(),
        });
    }
    Ok(ReturnDecomposition {
        prefix,
        marker: FiniteWord::from(marker),
        return_times,
    })
}

impl<'a> ReturnDecomposition<'a> {
    pub fn marker(&self) -> &FiniteWord {
        &self.marker
    }

    /// `τ_0 < τ_1 < ⋯ < τ_i`.
    pub fn return_times(&self) -> &[usize] {
        &self.return_times
    }

    /// Length `N` of the analysed prefix.
    pub fn horizon(&self) -> usize {
        self.prefix.len()
    }

    pub fn prefix(&self) -> &'a [Symbol] {
        self.prefix
    }

    /// Index `i` of the last return time; also the number of return words.
    pub fn last_index(&self) -> usize {
        self.return_times.len() - 1
    }

    /// `τ_i` for the largest available `i`.
    pub fn last_return_time(&self) -> usize {
        *self.return_times.last().unwrap()
    }

    /// `ζ_0 = ω_0 ⋯ ω_{τ_0−1}`.
    pub fn prefix_word(&self) -> &'a [Symbol] {
        &self.prefix[..self.return_times[0]]
    }

    /// `ζ_j = ω_{τ_{j−1}} ⋯ ω_{τ_j−1}` for `1 ≤ j ≤ i`.
    pub fn return_word(&self, j: usize) -> &'a [Symbol] {
        assert!(j >= 1 && j <= self.last_index(), "return word index {j} out of range");
        &self.prefix[self.return_times[j - 1]..self.return_times[j]]
    }

    /// `ζ_1, …, ζ_i` in order.
    pub fn return_words(&self) -> impl Iterator<Item = &'a [Symbol]> + '_ {
        let prefix = self.prefix;
        self.return_times.windows(2).map(move |w| &prefix[w[0]..w[1]])
    }

    /// `|ζ_1|, …, |ζ_i|`.
    pub fn return_lengths(&self) -> impl Iterator<Item = usize> + '_ {
        self.return_times.windows(2).map(|w| w[1] - w[0])
    }

    /// `ω_{τ_i} ⋯ ω_{N−1}`, excluded from the return words.
    pub fn remainder(&self) -> &'a [Symbol] {
        &self.prefix[self.last_return_time()..]
    }
}

/// Share of positions `k ∈ [0, N−|w|]` where `word` occurs.
///
/// The empty word has frequency 1; a word longer than the prefix has 0.
pub fn empirical_frequency(prefix: &[Symbol], word: &[Symbol]) -> f64 {
    if word.is_empty() {
        return 1.0;
    }
    if word.len() > prefix.len() {
        return 0.0;
    }
    let windows = prefix.len() - word.len() + 1;
    occurrences(prefix, word, 0).len() as f64 / windows as f64
}

/// `(i, i/τ_i)` for every return index; converges to `ν([v])` at generic points.
pub fn return_rate_trace(decomp: &ReturnDecomposition) -> Vec<(usize, f64)> {
    decomp
        .return_times()
        .iter()
        .enumerate()
        .map(|(i, &t)| (i, i as f64 / t as f64))
        .collect()
}

/// `(1/τ_i) Σ_{j=1}^{i} |ζ_j| 1{|ζ_j| > M}` at the last return index.
pub fn long_word_mass(decomp: &ReturnDecomposition, cutoff: usize) -> f64 {
    let long: usize = decomp.return_lengths().filter(|&l| l > cutoff).sum();
    long as f64 / decomp.last_return_time() as f64
}
