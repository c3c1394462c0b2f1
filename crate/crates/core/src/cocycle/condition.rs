use std::collections::HashSet;

use super::trace::RollingIndex;
use super::CocycleSpec;
use crate::error::{Error, Result};
use crate::matproc::{ScaledProduct, SupportPattern};
use crate::symbolic::{FiniteWord, Symbol};

/// A word `u` of length `ℓ0 + r − 1` on which `A^{(ℓ0)}` is strictly positive.
#[derive(Clone, Debug, PartialEq)]
pub struct PositivityWitness {
    pub u: FiniteWord,
    pub ell0: usize,
    /// Position of the first observed occurrence of `u` (`None` in exhaustive mode).
    pub position: Option<usize>,
    /// `log b`, `b` the smallest entry of `A^{(ℓ0)}` on `[u]`.
    pub log_b: f64,
}

impl PositivityWitness {
    /// `b` itself; 0 if below the `f64` range.
    pub fn b(&self) -> f64 {
        self.log_b.exp()
    }
}

/// The positive-product window `A^{(ℓ)}` determined by `word` (|word| = ℓ + r − 1).
pub fn window_product(spec: &CocycleSpec, word: &[Symbol]) -> Result<ScaledProduct> {
    let ell = word.len() + 1 - spec.depth();
    let mut acc = ScaledProduct::identity(spec.dim());
    for k in 0..ell {
        acc.push(spec.factor(&word[k..])?)?;
    }
    Ok(acc)
}

fn witness(spec: &CocycleSpec, word: &[Symbol], ell: usize, position: Option<usize>) -> Result<PositivityWitness> {
    let product = window_product(spec, word)?;
    let min_unit = product
        .unit_log_entries()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    Ok(PositivityWitness {
        u: FiniteWord::from(word),
        ell0: ell,
        position,
        log_b: min_unit + product.log_norm(),
    })
}

/// Searches observed windows of `sample` for the smallest `ℓ ≤ max_ell`
/// such that some `A^{(ℓ)}` is strictly positive; ties go to the earliest
/// position. `None` means no witness in the sample, which is a legitimate
/// answer: the condition can fail.
pub fn check_positivity_condition(
    spec: &CocycleSpec,
    sample: &[Symbol],
    max_ell: usize,
) -> Result<Option<PositivityWitness>> {
    if max_ell == 0 {
        return Err(Error::InvalidParameter("max_ell must be at least 1".into()));
    }
    let r = spec.depth();
    if sample.len() < r {
        return Ok(None);
    }
    let supports: Vec<&SupportPattern> = spec.palette().map(|p| p.support()).collect();
    spec.alphabet().check_word(sample)?;
    // palette slot of the factor at every position
    let positions = sample.len() + 1 - r;
    let mut roll = RollingIndex::new(spec);
    for &s in &sample[..r - 1] {
        roll.feed(s);
    }
    let slots: Vec<usize> = sample[r - 1..]
        .iter()
        .map(|&s| spec.slot(roll.feed(s)))
        .collect();

    let mut seen: HashSet<&[usize]> = HashSet::new();
    let mut best: Option<(usize, usize)> = None; // (ell, position)
    for k in 0..positions {
        let reach = max_ell.min(positions - k);
        let run = &slots[k..k + reach];
        if !seen.insert(run) {
            continue;
        }
        let limit = best.map_or(reach, |(l, _)| reach.min(l - 1));
        let mut acc = SupportPattern::identity(spec.dim());
        for (i, &slot) in run.iter().take(limit).enumerate() {
            acc = acc.product(supports[slot]);
            if acc.is_zero() {
                break;
            }
            if acc.is_full() {
                best = Some((i + 1, k));
                break;
            }
        }
        if best.is_some_and(|(l, _)| l == 1) {
            break;
        }
    }
    match best {
        None => Ok(None),
        Some((ell, k)) => witness(spec, &sample[k..k + ell + r - 1], ell, Some(k)).map(Some),
    }
}

/// Searches every word of length `ℓ + r − 1` for `ℓ ≤ max_ell`, in
/// lexicographic order. Refuses when more than `2^22` words would be scanned.
pub fn check_positivity_exhaustive(
    spec: &CocycleSpec,
    max_ell: usize,
) -> Result<Option<PositivityWitness>> {
    let m = spec.alphabet().size();
    for ell in 1..=max_ell {
        let len = ell + spec.depth() - 1;
        if m.checked_pow(len as u32).is_none_or(|c| c > 1 << 22) {
            return Err(Error::InvalidParameter(format!(
                "exhaustive search over {m}^{len} words is too large"
            )));
        }
        for w in spec.alphabet().words(len) {
            let mut acc = SupportPattern::identity(spec.dim());
            for k in 0..ell {
                acc = acc.product(spec.factor(&w[k..])?.support());
            }
            if acc.is_full() {
                return witness(spec, &w, ell, None).map(Some);
            }
        }
    }
    Ok(None)
}
