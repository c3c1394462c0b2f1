use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::program::{BlockPart, BlockProgram};
use super::word::{Alphabet, FiniteWord, Symbol};
use crate::error::{Error, Result};

const PROBABILITY_TOL: f64 = 1e-12;

/// What kind of infinite word a source produces.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SourceKind {
    /// `cycle cycle cycle …`
    Periodic { cycle: FiniteWord },
    /// Fixed point of the substitution `a ↦ rules[a]` starting with `seed_letter`.
    Substitution { rules: Vec<FiniteWord>, seed_letter: Symbol },
    /// i.i.d. symbols with the given law.
    Bernoulli {
        probabilities: Vec<f64>,
        seed: u64,
        #[serde(default)]
        stream: u64,
    },
    /// Markov chain with row-stochastic `transition` and law `initial` for `ω_0`.
    Markov {
        transition: Vec<Vec<f64>>,
        initial: Vec<f64>,
        seed: u64,
        #[serde(default)]
        stream: u64,
    },
    /// `ω_k = μ(k+1)²`, sieved up to `capacity` symbols.
    Squarefree { capacity: usize },
    BlockSchedule(BlockProgram),
}

/// A replayable description of an infinite word `ω ∈ {0,…,m−1}^ℕ`.
///
/// The source itself is immutable; [`InfiniteWordSource::stream`] hands out
/// independent cursors starting at position 0.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSource", into = "RawSource")]
pub struct InfiniteWordSource {
    alphabet: Alphabet,
    kind: SourceKind,
}

#[derive(Serialize, Deserialize)]
struct RawSource {
    alphabet: usize,
    #[serde(flatten)]
    kind: SourceKind,
}

impl TryFrom<RawSource> for InfiniteWordSource {
    type Error = Error;
    fn try_from(raw: RawSource) -> Result<Self> {
        InfiniteWordSource::new(raw.alphabet, raw.kind)
    }
}

impl From<InfiniteWordSource> for RawSource {
    fn from(s: InfiniteWordSource) -> Self {
        RawSource {
            alphabet: s.alphabet.size(),
            kind: s.kind,
        }
    }
}

fn check_distribution(p: &[f64], m: usize, what: &str) -> Result<()> {
    if p.len() != m {
        return Err(Error::InvalidSource(format!(
            "{what} has {} entries for an alphabet of size {m}",
            p.len()
        )));
    }
    if p.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
        return Err(Error::InvalidSource(format!("{what} has a negative or non-finite entry")));
    }
    let total: f64 = p.iter().sum();
    if (total - 1.0).abs() > PROBABILITY_TOL {
        return Err(Error::InvalidSource(format!("{what} sums to {total}, not 1")));
    }
    Ok(())
}

impl InfiniteWordSource {
    pub fn new(alphabet: usize, kind: SourceKind) -> Result<Self> {
        let a = Alphabet::new(alphabet)?;
        let m = a.size();
        match &kind {
            SourceKind::Periodic { cycle } => {
                if cycle.is_empty() {
                    return Err(Error::InvalidSource("periodic cycle is empty".into()));
                }
                a.check_word(cycle)?;
            }
            SourceKind::Substitution { rules, seed_letter } => {
                if rules.len() != m {
                    return Err(Error::InvalidSource(format!(
                        "{} substitution rules for an alphabet of size {m}",
                        rules.len()
                    )));
                }
                for (letter, image) in rules.iter().enumerate() {
                    if image.is_empty() {
                        return Err(Error::InvalidSource(format!(
                            "substitution erases letter {letter}"
                        )));
                    }
                    a.check_word(image)?;
                }
                if !a.contains(*seed_letter) {
                    return Err(Error::InvalidSymbol {
                        symbol: *seed_letter as u32,
                        size: m,
                    });
                }
                let image = &rules[*seed_letter as usize];
                if image[0] != *seed_letter {
                    return Err(Error::InvalidSource(format!(
                        "image of seed letter {seed_letter} does not start with it"
                    )));
                }
                if image.len() < 2 {
                    return Err(Error::InvalidSource(format!(
                        "image of seed letter {seed_letter} has length 1; the fixed point is not infinite"
                    )));
                }
            }
            SourceKind::Bernoulli { probabilities, .. } => {
                check_distribution(probabilities, m, "bernoulli probabilities")?;
            }
            SourceKind::Markov {
                transition, initial, ..
            } => {
                check_distribution(initial, m, "initial distribution")?;
                if transition.len() != m {
                    return Err(Error::InvalidSource(format!(
                        "transition matrix has {} rows for an alphabet of size {m}",
                        transition.len()
                    )));
                }
                for (i, row) in transition.iter().enumerate() {
                    check_distribution(row, m, &format!("transition row {i}"))?;
                }
            }
            SourceKind::Squarefree { capacity } => {
                if m < 2 {
                    return Err(Error::InvalidSource(
                        "squarefree indicator needs a binary alphabet".into(),
                    ));
                }
                if *capacity == 0 {
                    return Err(Error::InvalidSource("squarefree capacity is zero".into()));
                }
            }
            SourceKind::BlockSchedule(program) => program.validate(m)?,
        }
        Ok(InfiniteWordSource { alphabet: a, kind })
    }

    pub fn periodic(alphabet: usize, cycle: &str) -> Result<Self> {
        Self::new(
            alphabet,
            SourceKind::Periodic {
                cycle: cycle.parse()?,
            },
        )
    }

    /// The Thue–Morse word `0110100110010110…`.
    pub fn thue_morse() -> Self {
        Self::new(
            2,
            SourceKind::Substitution {
                rules: vec![FiniteWord::new(vec![0, 1]), FiniteWord::new(vec![1, 0])],
                seed_letter: 0,
            },
        )
        .expect("valid substitution")
    }

    pub fn bernoulli(probabilities: Vec<f64>, seed: u64) -> Result<Self> {
        Self::new(
            probabilities.len(),
            SourceKind::Bernoulli {
                probabilities,
                seed,
                stream: 0,
            },
        )
    }

    pub fn squarefree(capacity: usize) -> Result<Self> {
        Self::new(2, SourceKind::Squarefree { capacity })
    }

    pub fn block_schedule(alphabet: usize, program: BlockProgram) -> Result<Self> {
        Self::new(alphabet, SourceKind::BlockSchedule(program))
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn kind(&self) -> &SourceKind {
        &self.kind
    }

    /// True for sources driven by a seeded generator.
    pub fn is_random(&self) -> bool {
        matches!(
            self.kind,
            SourceKind::Bernoulli { .. } | SourceKind::Markov { .. }
        )
    }

    /// An independent realisation: the same law on generator stream `index`.
    /// Deterministic sources are returned unchanged.
    pub fn replica(&self, index: u64) -> Self {
        let mut out = self.clone();
        match &mut out.kind {
            SourceKind::Bernoulli { stream, .. } | SourceKind::Markov { stream, .. } => {
                *stream = index
            }
            _ => {}
        }
        out
    }

    /// Fresh cursor at position 0.
    pub fn stream(&self) -> SymbolStream {
        SymbolStream {
            state: State::new(&self.kind),
            position: 0,
            failed: false,
        }
    }

    /// `ω_0 … ω_{n−1}`.
    pub fn emit_prefix(&self, n: usize) -> Result<FiniteWord> {
        let mut out = Vec::with_capacity(n);
        for symbol in self.stream().take(n) {
            out.push(symbol?);
        }
        Ok(FiniteWord::new(out))
    }

    /// Serialises to the structured text form.
    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }
}

/// Cursor over a source; yields `Err` once (and then stops) if generation fails.
pub struct SymbolStream {
    state: State,
    position: usize,
    failed: bool,
}

impl SymbolStream {
    /// Index of the next symbol to be produced.
    pub fn position(&self) -> usize {
        self.position
    }
}

impl Iterator for SymbolStream {
    type Item = Result<Symbol>;

    fn next(&mut self) -> Option<Result<Symbol>> {
        if self.failed {
            return None;
        }
        let out = self.state.next(self.position);
        match out {
            Ok(s) => {
                self.position += 1;
                Some(Ok(s))
            }
            Err(e) => {
                self.failed = true;
                Some(Err(e))
            }
        }
    }
}

enum State {
    Periodic {
        cycle: Vec<Symbol>,
    },
    Substitution {
        rules: Vec<Vec<Symbol>>,
        generated: Vec<Symbol>,
        read: usize,
    },
    Bernoulli {
        rng: ChaCha8Rng,
        cumulative: Vec<f64>,
        fallback: Symbol,
    },
    Markov {
        rng: ChaCha8Rng,
        initial: Vec<f64>,
        rows: Vec<Vec<f64>>,
        fallbacks: Vec<Symbol>,
        initial_fallback: Symbol,
        current: Option<Symbol>,
    },
    Squarefree(Sieve),
    Block(Box<BlockStream>),
}

fn seeded(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn cumulative(p: &[f64]) -> (Vec<f64>, Symbol) {
    let mut acc = 0.0;
    let cum = p
        .iter()
        .map(|x| {
            acc += x;
            acc
        })
        .collect();
    let fallback = p.iter().rposition(|&x| x > 0.0).unwrap_or(0) as Symbol;
    (cum, fallback)
}

/// Uniform draw in `[0,1)` from one 64-bit output.
fn uniform(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

fn sample(rng: &mut ChaCha8Rng, cumulative: &[f64], fallback: Symbol) -> Symbol {
    let u = uniform(rng);
    cumulative
        .iter()
        .position(|&c| u < c)
        .map_or(fallback, |i| i as Symbol)
}

impl State {
    fn new(kind: &SourceKind) -> State {
        match kind {
            SourceKind::Periodic { cycle } => State::Periodic {
                cycle: cycle.to_vec(),
            },
            SourceKind::Substitution { rules, seed_letter } => {
                let rules: Vec<Vec<Symbol>> = rules.iter().map(|r| r.to_vec()).collect();
                State::Substitution {
                    generated: rules[*seed_letter as usize].clone(),
                    rules,
                    read: 1,
                }
            }
            SourceKind::Bernoulli {
                probabilities,
                seed,
                stream,
            } => {
                let (cumulative, fallback) = cumulative(probabilities);
                State::Bernoulli {
                    rng: seeded(*seed, *stream),
                    cumulative,
                    fallback,
                }
            }
            SourceKind::Markov {
                transition,
                initial,
                seed,
                stream,
            } => {
                let (initial, initial_fallback) = cumulative(initial);
                let (rows, fallbacks) = transition.iter().map(|r| cumulative(r)).unzip();
                State::Markov {
                    rng: seeded(*seed, *stream),
                    initial,
                    rows,
                    fallbacks,
                    initial_fallback,
                    current: None,
                }
            }
            SourceKind::Squarefree { capacity } => State::Squarefree(Sieve::new(*capacity)),
            SourceKind::BlockSchedule(program) => {
                State::Block(Box::new(BlockStream::new(program.clone())))
            }
        }
    }

    fn next(&mut self, position: usize) -> Result<Symbol> {
        match self {
            State::Periodic { cycle } => Ok(cycle[position % cycle.len()]),
            State::Substitution {
                rules,
                generated,
                read,
            } => {
                // `generated` is σ(ω_0)⋯σ(ω_{read−1}), always a prefix of the fixed point
                while generated.len() <= position {
                    let letter = generated[*read];
                    generated.extend_from_slice(&rules[letter as usize]);
                    *read += 1;
                }
                Ok(generated[position])
            }
            State::Bernoulli {
                rng,
                cumulative,
                fallback,
            } => Ok(sample(rng, cumulative, *fallback)),
            State::Markov {
                rng,
                initial,
                rows,
                fallbacks,
                initial_fallback,
                current,
            } => {
                let s = match *current {
                    None => sample(rng, initial, *initial_fallback),
                    Some(prev) => {
                        let p = prev as usize;
                        sample(rng, &rows[p], fallbacks[p])
                    }
                };
                *current = Some(s);
                Ok(s)
            }
            State::Squarefree(sieve) => sieve.get(position),
            State::Block(block) => block.next(),
        }
    }
}

const SIEVE_SEGMENT: usize = 1 << 16;

/// Segmented sieve for the squarefree indicator of `n = position + 1`.
struct Sieve {
    capacity: usize,
    primes: Vec<usize>,
    segment_start: usize,
    segment: Vec<Symbol>,
}

impl Sieve {
    fn new(capacity: usize) -> Sieve {
        // primes p with p² ≤ capacity
        let limit = capacity.isqrt();
        let mut composite = vec![false; limit + 1];
        let mut primes = Vec::new();
        for p in 2..=limit {
            if !composite[p] {
                primes.push(p);
                let mut q = p * p;
                while q <= limit {
                    composite[q] = true;
                    q += p;
                }
            }
        }
        Sieve {
            capacity,
            primes,
            segment_start: 0,
            segment: Vec::new(),
        }
    }

    fn get(&mut self, position: usize) -> Result<Symbol> {
        if position >= self.capacity {
            return Err(Error::CapacityExceeded {
                requested: position + 1,
                capacity: self.capacity,
            });
        }
        if position < self.segment_start || position >= self.segment_start + self.segment.len() {
            self.fill(position - position % SIEVE_SEGMENT);
        }
        Ok(self.segment[position - self.segment_start])
    }

    /// Sieves the integers `start+1 ..= start+len`.
    fn fill(&mut self, start: usize) {
        let len = SIEVE_SEGMENT.min(self.capacity - start);
        let mut seg = vec![1; len];
        let lo = start + 1;
        for &p in &self.primes {
            let sq = p * p;
            if sq > start + len {
                break;
            }
            let mut n = lo.div_ceil(sq) * sq;
            while n <= start + len {
                seg[n - lo] = 0;
                n += sq;
            }
        }
        self.segment_start = start;
        self.segment = seg;
    }
}

struct BlockStream {
    program: BlockProgram,
    /// Lazily extended prefixes of the sub-sources, one slot per part.
    caches: Vec<Option<(SymbolStream, Vec<Symbol>)>>,
    buffer: Vec<Symbol>,
    cursor: usize,
    next_index: u64,
}

impl BlockStream {
    fn new(program: BlockProgram) -> BlockStream {
        let caches = program
            .parts
            .iter()
            .map(|p| match p {
                BlockPart::SourcePrefix { source, .. } => Some((source.stream(), Vec::new())),
                _ => None,
            })
            .collect();
        BlockStream {
            buffer: program.head.to_vec(),
            program,
            caches,
            cursor: 0,
            next_index: 0,
        }
    }

    fn next(&mut self) -> Result<Symbol> {
        if self.next_index == 0 {
            self.next_index = self.program.first_index;
        }
        while self.cursor >= self.buffer.len() {
            self.build_block()?;
        }
        let s = self.buffer[self.cursor];
        self.cursor += 1;
        Ok(s)
    }

    fn build_block(&mut self) -> Result<()> {
        let j = self.next_index;
        // validates emptiness and overflow before allocating
        let len = self.program.block_length(j)?;
        let len = usize::try_from(len)
            .map_err(|_| Error::InvalidProgram(format!("block {j} does not fit in memory")))?;
        self.buffer.clear();
        self.buffer.reserve(len);
        self.cursor = 0;
        for (part, cache) in self.program.parts.iter().zip(self.caches.iter_mut()) {
            if !self.program.is_active(part, j) {
                continue;
            }
            match part {
                BlockPart::Literal { word, .. } => self.buffer.extend_from_slice(word),
                BlockPart::Repeat { word, count, .. } => {
                    for _ in 0..count.eval(j)? {
                        self.buffer.extend_from_slice(word);
                    }
                }
                BlockPart::SourcePrefix { length, .. } => {
                    let n = length.eval(j)? as usize;
                    let (stream, prefix) = cache.as_mut().expect("cache for source part");
                    while prefix.len() < n {
                        match stream.next() {
                            Some(s) => prefix.push(s?),
                            None => {
                                return Err(Error::InvalidProgram(
                                    "sub-source stream ended".into(),
                                ))
                            }
                        }
                    }
                    self.buffer.extend_from_slice(&prefix[..n]);
                }
            }
        }
        self.next_index += 1;
        Ok(())
    }
}
