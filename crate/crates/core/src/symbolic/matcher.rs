use super::word::Symbol;

/// Streaming exact matcher (Knuth–Morris–Pratt).
///
/// Feed symbols one at a time; [`Matcher::feed`] reports when an
/// occurrence of the pattern ends at the symbol just fed. Overlapping
/// occurrences are all reported.
#[derive(Clone, Debug)]
pub struct Matcher {
    pattern: Vec<Symbol>,
    failure: Vec<usize>,
    state: usize,
}

impl Matcher {
    /// Panics on an empty pattern.
    pub fn new(pattern: &[Symbol]) -> Matcher {
        assert!(!pattern.is_empty(), "matcher pattern must be non-empty");
        let mut failure = vec![0; pattern.len()];
        let mut k = 0;
        for i in 1..pattern.len() {
            while k > 0 && pattern[i] != pattern[k] {
                k = failure[k - 1];
            }
            if pattern[i] == pattern[k] {
                k += 1;
            }
            failure[i] = k;
        }
        Matcher {
            pattern: pattern.to_vec(),
            failure,
            state: 0,
        }
    }

    pub fn pattern(&self) -> &[Symbol] {
        &self.pattern
    }

    pub fn reset(&mut self) {
        self.state = 0;
    }

    pub fn feed(&mut self, s: Symbol) -> bool {
        while self.state > 0 && self.pattern[self.state] != s {
            self.state = self.failure[self.state - 1];
        }
        if self.pattern[self.state] == s {
            self.state += 1;
        }
        if self.state == self.pattern.len() {
            self.state = self.failure[self.state - 1];
            true
        } else {
            false
        }
    }
}

/// Every `k ≥ start` with `prefix[k..k+|marker|] == marker`, increasing.
///
/// An empty marker has no occurrences by convention.
pub fn occurrences(prefix: &[Symbol], marker: &[Symbol], start: usize) -> Vec<usize> {
    if marker.is_empty() || marker.len() > prefix.len() {
        return Vec::new();
    }
    let mut m = Matcher::new(marker);
    let len = marker.len();
    let mut out = Vec::new();
    for (i, &s) in prefix.iter().enumerate() {
        if m.feed(s) {
            let k = i + 1 - len;
            if k >= start {
                out.push(k);
            }
        }
    }
    out
}

#[cfg(test)]
pub(crate) fn naive_occurrences(prefix: &[Symbol], marker: &[Symbol], start: usize) -> Vec<usize> {
    if marker.is_empty() || marker.len() > prefix.len() {
        return Vec::new();
    }
    (start..=prefix.len() - marker.len())
        .filter(|&k| prefix[k..k + marker.len()] == *marker)
        .collect()
}
