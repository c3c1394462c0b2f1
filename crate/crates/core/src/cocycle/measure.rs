use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::symbolic::{Alphabet, FiniteWord, InfiniteWordSource, SourceKind, Symbol};

const MASS_TOL: f64 = 1e-12;

/// Shift-invariant measure models with computable cylinder masses.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MeasureKind {
    Bernoulli {
        probabilities: Vec<f64>,
    },
    /// Stationary Markov chain; `stationary` is `π` with `πP = π`.
    Markov {
        transition: Vec<Vec<f64>>,
        stationary: Vec<f64>,
    },
    /// `(1/p) Σ_{k<p} δ_{σ^k(cycle^∞)}`.
    PeriodicAtomic {
        cycle: FiniteWord,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMeasure", into = "RawMeasure")]
pub struct MeasureModel {
    alphabet: Alphabet,
    kind: MeasureKind,
}

#[derive(Serialize, Deserialize)]
struct RawMeasure {
    alphabet: usize,
    #[serde(flatten)]
    kind: MeasureKind,
}

impl TryFrom<RawMeasure> for MeasureModel {
    type Error = Error;
    fn try_from(r: RawMeasure) -> Result<Self> {
        MeasureModel::new(r.alphabet, r.kind)
    }
}

impl From<MeasureModel> for RawMeasure {
    fn from(m: MeasureModel) -> Self {
        RawMeasure {
            alphabet: m.alphabet.size(),
            kind: m.kind,
        }
    }
}

fn check_row(p: &[f64], m: usize, what: &str) -> Result<()> {
    if p.len() != m || p.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
        return Err(Error::InvalidParameter(format!("{what} is not a distribution on {m} symbols")));
    }
    let total: f64 = p.iter().sum();
    if (total - 1.0).abs() > MASS_TOL {
        return Err(Error::InvalidParameter(format!("{what} sums to {total}")));
    }
    Ok(())
}

impl MeasureModel {
    pub fn new(alphabet: usize, kind: MeasureKind) -> Result<Self> {
        let a = Alphabet::new(alphabet)?;
        let m = a.size();
        match &kind {
            MeasureKind::Bernoulli { probabilities } => check_row(probabilities, m, "probabilities")?,
            MeasureKind::Markov {
                transition,
                stationary,
            } => {
                check_row(stationary, m, "stationary law")?;
                if transition.len() != m {
                    return Err(Error::InvalidParameter("transition matrix has wrong size".into()));
                }
                for (i, row) in transition.iter().enumerate() {
                    check_row(row, m, &format!("transition row {i}"))?;
                }
                for j in 0..m {
                    let pj: f64 = (0..m).map(|i| stationary[i] * transition[i][j]).sum();
                    if (pj - stationary[j]).abs() > 1e-10 {
                        return Err(Error::InvalidParameter(format!(
                            "law is not stationary at symbol {j}: πP = {pj}, π = {}",
                            stationary[j]
                        )));
                    }
                }
            }
            MeasureKind::PeriodicAtomic { cycle } => {
                if cycle.is_empty() {
                    return Err(Error::InvalidParameter("periodic cycle is empty".into()));
                }
                a.check_word(cycle)?;
            }
        }
        Ok(MeasureModel { alphabet: a, kind })
    }

    pub fn bernoulli(probabilities: Vec<f64>) -> Result<Self> {
        Self::new(probabilities.len(), MeasureKind::Bernoulli { probabilities })
    }

    /// Stationary chain; `π` is found by power iteration on the Cesàro
    /// averages, which also converges for periodic chains.
    pub fn markov(transition: Vec<Vec<f64>>) -> Result<Self> {
        let m = transition.len();
        if m == 0 {
            return Err(Error::InvalidParameter("empty transition matrix".into()));
        }
        let mut pi = vec![1.0 / m as f64; m];
        for _ in 0..100_000 {
            let mut next = vec![0.0; m];
            for i in 0..m {
                for j in 0..m {
                    next[j] += pi[i] * transition[i].get(j).copied().unwrap_or(0.0);
                }
            }
            let avg: Vec<f64> = pi.iter().zip(&next).map(|(a, b)| 0.5 * (a + b)).collect();
            let delta = avg.iter().zip(&pi).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            pi = avg;
            if delta < 1e-15 {
                break;
            }
        }
        let total: f64 = pi.iter().sum();
        pi.iter_mut().for_each(|x| *x /= total);
        Self::new(
            m,
            MeasureKind::Markov {
                transition,
                stationary: pi,
            },
        )
    }

    pub fn periodic(alphabet: usize, cycle: &str) -> Result<Self> {
        Self::new(
            alphabet,
            MeasureKind::PeriodicAtomic {
                cycle: cycle.parse()?,
            },
        )
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn kind(&self) -> &MeasureKind {
        &self.kind
    }

    /// `ν([word])`.
    pub fn cylinder_mass(&self, word: &[Symbol]) -> f64 {
        if word.iter().any(|&s| !self.alphabet.contains(s)) {
            return 0.0;
        }
        match &self.kind {
            MeasureKind::Bernoulli { probabilities } => {
                word.iter().map(|&s| probabilities[s as usize]).product()
            }
            MeasureKind::Markov {
                transition,
                stationary,
            } => match word.split_first() {
                None => 1.0,
                Some((&first, _)) => {
                    stationary[first as usize]
                        * word
                            .windows(2)
                            .map(|w| transition[w[0] as usize][w[1] as usize])
                            .product::<f64>()
                }
            },
            MeasureKind::PeriodicAtomic { cycle } => {
                let p = cycle.len();
                let hits = (0..p)
                    .filter(|&k| word.iter().enumerate().all(|(i, &s)| cycle[(k + i) % p] == s))
                    .count();
                hits as f64 / p as f64
            }
        }
    }

    /// A source whose law is `ν`, for Monte-Carlo sampling. `None` for the
    /// periodic model, which is handled exactly.
    pub fn sampler(&self, seed: u64) -> Option<InfiniteWordSource> {
        let m = self.alphabet.size();
        let kind = match &self.kind {
            MeasureKind::Bernoulli { probabilities } => SourceKind::Bernoulli {
                probabilities: probabilities.clone(),
                seed,
                stream: 0,
            },
            MeasureKind::Markov {
                transition,
                stationary,
            } => SourceKind::Markov {
                transition: transition.clone(),
                initial: stationary.clone(),
                seed,
                stream: 0,
            },
            MeasureKind::PeriodicAtomic { .. } => return None,
        };
        Some(InfiniteWordSource::new(m, kind).expect("validated measure"))
    }

    /// `max_w |freq(w) − ν([w])|` over all words of the given length.
    pub fn frequency_distance(&self, prefix: &[Symbol], length: usize) -> f64 {
        self.alphabet
            .words(length)
            .map(|w| {
                (crate::symbolic::empirical_frequency(prefix, &w) - self.cylinder_mass(&w)).abs()
            })
            .fold(0.0, f64::max)
    }
}
