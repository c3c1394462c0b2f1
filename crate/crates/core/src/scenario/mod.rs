//! Named, serialisable experiments reproducing the worked examples, with
//! a pure verdict comparing what was observed to what the example predicts.

mod registry;
mod run;
mod verdict;

use serde::{Deserialize, Serialize};

use crate::cocycle::CocycleSpec;
use crate::error::{Error, Result};
use crate::matproc::{LogMatrix, NonNegMatrix};
use crate::multifractal::WeightedAverageSpec;
use crate::symbolic::InfiniteWordSource;

pub use registry::{find, registry, ScenarioSummary};
pub use run::{run_scenario, write_atomic, RunReport, SCENARIO_FILE};
pub use verdict::{
    condition_verdict, returns_verdict, spectrum_verdict, trace_verdict, verdict_from_dir,
    Verdict,
};

/// Qualitative behaviour of a run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    Converges,
    Oscillates,
    MinusInfinity,
    ConditionFails,
    /// Long return words keep a non-vanishing share of the orbit.
    HeavyReturns,
    /// Only ever observed: the positivity check found a witness.
    ConditionHolds,
    /// Only ever observed: no rule fired.
    Inconclusive,
}

impl Outcome {
    pub fn tag(self) -> &'static str {
        match self {
            Outcome::Converges => "converges",
            Outcome::Oscillates => "oscillates",
            Outcome::MinusInfinity => "minus-infinity",
            Outcome::ConditionFails => "condition-fails",
            Outcome::HeavyReturns => "heavy-returns",
            Outcome::ConditionHolds => "condition-holds",
            Outcome::Inconclusive => "inconclusive",
        }
    }
}

/// How the matrix-valued function is described.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CocycleModel {
    /// `A(ω) = matrices[ω_0]`.
    FirstCoordinate { matrices: Vec<Vec<Vec<f64>>> },
    /// An explicit table of any depth.
    Table { spec: CocycleSpec },
    /// `A(x) = f(x) J` on `{0,1}^ℕ`, `f(x) = exp(−2^k)` with `k` the index of
    /// the first 1 in `x`, read from `depth` symbols; a window of zeros gets
    /// `exp(−2^depth)`, the smallest value `f` takes on that cylinder
    /// outside `0^∞`.
    FlatTail { depth: usize },
    /// The β-deformed family of a weighted average.
    Weighted { spec: WeightedAverageSpec },
}

impl CocycleModel {
    pub fn build(&self) -> Result<CocycleSpec> {
        match self {
            CocycleModel::FirstCoordinate { matrices } => {
                let ms = matrices
                    .iter()
                    .map(|rows| NonNegMatrix::from_rows(rows))
                    .collect::<Result<Vec<_>>>()?;
                CocycleSpec::first_coordinate(&ms)
            }
            CocycleModel::Table { spec } => Ok(spec.clone()),
            CocycleModel::FlatTail { depth } => flat_tail(*depth),
            CocycleModel::Weighted { .. } => Err(Error::Config(
                "a weighted model defines a family of cocycles, not a single one".into(),
            )),
        }
    }

    pub fn from_matrices(matrices: &[NonNegMatrix]) -> Self {
        CocycleModel::FirstCoordinate {
            matrices: matrices.iter().map(|m| m.rows().map(<[f64]>::to_vec).collect()).collect(),
        }
    }
}

fn flat_tail(depth: usize) -> Result<CocycleSpec> {
    if !(1..=24).contains(&depth) {
        return Err(Error::InvalidParameter(format!("flat-tail depth {depth} outside 1..=24")));
    }
    CocycleSpec::from_fn(2, depth, |w| {
        let k = w.iter().position(|&s| s == 1).unwrap_or(depth);
        let log_f = -(2f64.powi(k as i32));
        LogMatrix::from_log_entries(2, vec![log_f; 4])
    })
}

/// Thresholds of the trace verdict.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TraceRules {
    /// Checkpoints `n ≥ late_fraction · horizon` form the late window.
    pub late_fraction: f64,
    /// Oscillation when the late window's exponents spread by more than this.
    pub oscillation_gap: f64,
    /// Convergence when the exponents at the last two geometric checkpoints
    /// differ by less than `convergence_tol · max(1, |exponent|)`.
    pub convergence_tol: f64,
    /// First point of the geometric checkpoint grid.
    pub geometric_start: usize,
    /// Number of evenly spaced checkpoints added on top.
    pub linear_points: usize,
}

impl Default for TraceRules {
    fn default() -> Self {
        TraceRules {
            late_fraction: 1.0 / 16.0,
            oscillation_gap: 1.0,
            convergence_tol: 1e-3,
            geometric_start: 16,
            linear_points: 256,
        }
    }
}

/// Structural positivity check on a sample of the measure.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConditionProbe {
    /// Word whose windows stand for the support of `ν`.
    pub sample: InfiniteWordSource,
    pub length: usize,
    pub max_ell: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum SpectrumOracle {
    /// `dim = H(α)/log 2`, the binary entropy.
    BinaryEntropy { tolerance: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "analysis", rename_all = "snake_case", deny_unknown_fields)]
pub enum AnalysisPlan {
    Trace {
        horizon: usize,
        #[serde(default)]
        rules: TraceRules,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        condition: Option<ConditionProbe>,
    },
    Returns {
        horizons: Vec<usize>,
        k0: usize,
        cutoffs: Vec<usize>,
        max_ell: usize,
        /// `z` is taken at the first occurrence of `u` from this position on.
        #[serde(default)]
        z_from: usize,
        /// Heavy returns when the long-word mass above `heavy_cutoff` exceeds
        /// `heavy_mass` at every horizon.
        heavy_cutoff: usize,
        heavy_mass: f64,
        #[serde(default)]
        rules: TraceRules,
    },
    Spectrum {
        betas: Vec<f64>,
        horizon: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        step: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        oracle: Option<SpectrumOracle>,
    },
    Condition {
        probe: ConditionProbe,
    },
}

impl AnalysisPlan {
    pub fn kind(&self) -> &'static str {
        match self {
            AnalysisPlan::Trace { .. } => "trace",
            AnalysisPlan::Returns { .. } => "returns",
            AnalysisPlan::Spectrum { .. } => "spectrum",
            AnalysisPlan::Condition { .. } => "condition",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    #[serde(default)]
    pub aliases: Vec<String>,
    /// Which example or result the scenario reproduces.
    pub citation: String,
    pub description: String,
    pub expected: Outcome,
    /// The orbit `ω`; spectrum plans read their weights from the model.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<InfiniteWordSource>,
    pub cocycle: CocycleModel,
    pub plan: AnalysisPlan,
}

impl Scenario {
    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }

    /// Applies `key=value` overrides, keys being dotted paths into the
    /// TOML form (`plan.horizon=200000`, `source.seed=3`,
    /// `plan.cutoffs.0=16`). Values are TOML literals; anything that does
    /// not parse as one is taken as a string.
    pub fn with_overrides<S: AsRef<str>>(&self, overrides: &[S]) -> Result<Self> {
        let mut doc = toml::Value::try_from(self).map_err(|e| Error::Config(e.to_string()))?;
        for o in overrides {
            let o = o.as_ref();
            let (key, raw) = o
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("override `{o}` is not of the form key=value")))?;
            set_path(&mut doc, key.trim(), parse_literal(raw.trim()))?;
        }
        doc.try_into()
            .map_err(|e: toml::de::Error| Error::Config(format!("after overrides: {e}")))
    }
}

fn parse_literal(raw: &str) -> toml::Value {
    toml::from_str::<toml::Table>(&format!("v = {raw}"))
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()))
}

fn set_path(doc: &mut toml::Value, key: &str, value: toml::Value) -> Result<()> {
    let bad = || Error::Config(format!("override key `{key}` does not name a field"));
    let parts: Vec<&str> = key.split('.').collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(bad());
    }
    let mut node = doc;
    for (i, part) in parts.iter().enumerate() {
        let last = i + 1 == parts.len();
        node = match node {
            toml::Value::Table(t) => {
                if last {
                    t.insert(part.to_string(), value);
                    return Ok(());
                }
                t.get_mut(*part).ok_or_else(bad)?
            }
            toml::Value::Array(a) => {
                let idx: usize = part.parse().map_err(|_| bad())?;
                let slot = a.get_mut(idx).ok_or_else(bad)?;
                if last {
                    *slot = value;
                    return Ok(());
                }
                slot
            }
            _ => return Err(bad()),
        };
    }
    Err(bad())
}
