use serde::{Deserialize, Serialize};

use crate::cocycle::CocycleSpec;
use crate::error::{Error, Result};
use crate::matproc::LogMatrix;
use crate::symbolic::{Alphabet, InfiniteWordSource, SourceKind};

/// Largest `|β v_j f(a,b)|` accepted when building the deformed matrices.
pub const MAX_EXPONENT: f64 = 700.0;

/// Weighted Birkhoff averages `(1/n) Σ w_k f(x_k, x_{k+1})` on `X = S^ℕ`,
/// `|S| = q`, with weights `w_k = v_{ω_k}` read along a word `ω`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawWeighted", into = "RawWeighted")]
pub struct WeightedAverageSpec {
    states: Alphabet,
    potential: Vec<f64>,
    weight_values: Vec<f64>,
    weight_source: InfiniteWordSource,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawWeighted {
    states: usize,
    potential: Vec<Vec<f64>>,
    weight_values: Vec<f64>,
    weight_source: InfiniteWordSource,
}

impl TryFrom<RawWeighted> for WeightedAverageSpec {
    type Error = Error;
    fn try_from(raw: RawWeighted) -> Result<Self> {
        let q = raw.states;
        if raw.potential.len() != q || raw.potential.iter().any(|row| row.len() != q) {
            return Err(Error::Config(format!("potential must be a {q}×{q} table")));
        }
        let flat = raw.potential.into_iter().flatten().collect();
        WeightedAverageSpec::new(q, flat, raw.weight_values, raw.weight_source)
    }
}

impl From<WeightedAverageSpec> for RawWeighted {
    fn from(spec: WeightedAverageSpec) -> Self {
        let q = spec.states.size();
        RawWeighted {
            states: q,
            potential: spec.potential.chunks(q).map(<[f64]>::to_vec).collect(),
            weight_values: spec.weight_values,
            weight_source: spec.weight_source,
        }
    }
}

impl WeightedAverageSpec {
    /// `potential` is the row-major table `f(a, b)`.
    pub fn new(
        states: usize,
        potential: Vec<f64>,
        weight_values: Vec<f64>,
        weight_source: InfiniteWordSource,
    ) -> Result<Self> {
        if states < 2 {
            return Err(Error::InvalidParameter(format!("need at least 2 states, got {states}")));
        }
        let states = Alphabet::new(states)?;
        let q = states.size();
        if potential.len() != q * q {
            return Err(Error::InvalidParameter(format!(
                "potential has {} entries, expected {}",
                potential.len(),
                q * q
            )));
        }
        if potential.iter().chain(&weight_values).any(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter("potential and weights must be finite".into()));
        }
        if weight_values.is_empty() {
            return Err(Error::InvalidParameter("need at least one weight value".into()));
        }
        if weight_source.alphabet().size() != weight_values.len() {
            return Err(Error::InvalidParameter(format!(
                "weight source has {} symbols but {} weight values are given",
                weight_source.alphabet().size(),
                weight_values.len()
            )));
        }
        Ok(WeightedAverageSpec {
            states,
            potential,
            weight_values,
            weight_source,
        })
    }

    /// Binary states, `f(a, b) = 1{a = 1}`, all weights 1: the averages are
    /// frequencies of the digit 1.
    pub fn besicovitch() -> Self {
        WeightedAverageSpec::new(
            2,
            vec![0.0, 0.0, 1.0, 1.0],
            vec![1.0],
            InfiniteWordSource::periodic(1, "0").expect("valid cycle"),
        )
        .expect("valid preset")
    }

    pub fn states(&self) -> Alphabet {
        self.states
    }

    pub fn potential(&self, a: usize, b: usize) -> f64 {
        self.potential[a * self.states.size() + b]
    }

    pub fn weight_values(&self) -> &[f64] {
        &self.weight_values
    }

    pub fn weight_source(&self) -> &InfiniteWordSource {
        &self.weight_source
    }

    /// Cycle of the weight source when it is periodic.
    pub fn periodic_cycle(&self) -> Option<&[u8]> {
        match self.weight_source.kind() {
            SourceKind::Periodic { cycle } => Some(cycle),
            _ => None,
        }
    }

    /// Same spec with `f` replaced by `f + c`.
    pub fn shifted(&self, c: f64) -> Result<Self> {
        WeightedAverageSpec::new(
            self.states.size(),
            self.potential.iter().map(|x| x + c).collect(),
            self.weight_values.clone(),
            self.weight_source.clone(),
        )
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }
}

/// Depth-one cocycle over the weight alphabet whose matrix for symbol `j`
/// has entries `exp(β v_j f(a, b))`.
///
/// Exponents beyond ±700 are refused with a range error rather than left
/// to overflow; rescale `f` or the weights in that case.
pub fn beta_cocycle(spec: &WeightedAverageSpec, beta: f64) -> Result<CocycleSpec> {
    if !beta.is_finite() {
        return Err(Error::InvalidParameter(format!("β = {beta} is not finite")));
    }
    let q = spec.states.size();
    CocycleSpec::from_fn(spec.weight_values.len(), 1, |w| {
        let v = spec.weight_values[w[0] as usize];
        let logs: Vec<f64> = spec.potential.iter().map(|f| beta * v * f).collect();
        if let Some(x) = logs.iter().find(|x| x.abs() > MAX_EXPONENT) {
            return Err(Error::Range(format!(
                "β v f = {x} at β = {beta} is outside ±{MAX_EXPONENT}; rescale the potential or weights"
            )));
        }
        LogMatrix::from_log_entries(q, logs)
    })
}
