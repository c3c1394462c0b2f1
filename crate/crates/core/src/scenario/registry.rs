use serde::{Deserialize, Serialize};

use super::{
    AnalysisPlan, CocycleModel, ConditionProbe, Outcome, Scenario, SpectrumOracle, TraceRules,
};
use crate::error::{Error, Result};
use crate::multifractal::WeightedAverageSpec;
use crate::symbolic::{BlockProgram, EpochSchedule, InfiniteWordSource, LengthRule};

/// One row of `list --json`.
///
/// The JSON output is an array of objects with exactly these keys:
/// `name` (string), `aliases` (array of strings), `citation` (non-empty
/// string), `expected` (one of the outcome tags), `analysis` (`trace`,
/// `returns`, `spectrum` or `condition`) and `description` (string).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSummary {
    pub name: String,
    pub aliases: Vec<String>,
    pub citation: String,
    pub expected: Outcome,
    pub analysis: String,
    pub description: String,
}

impl From<&Scenario> for ScenarioSummary {
    fn from(s: &Scenario) -> Self {
        ScenarioSummary {
            name: s.name.clone(),
            aliases: s.aliases.clone(),
            citation: s.citation.clone(),
            expected: s.expected,
            analysis: s.plan.kind().to_string(),
            description: s.description.clone(),
        }
    }
}

const DIAG: [[f64; 2]; 2] = [[10.0, 0.0], [0.0, 0.1]];
const SWAP: [[f64; 2]; 2] = [[0.0, 1.0], [1.0, 0.0]];
const ONES: [[f64; 2]; 2] = [[1.0, 1.0], [1.0, 1.0]];
const POS_A: [[f64; 2]; 2] = [[2.0, 1.0], [1.0, 1.0]];
const POS_B: [[f64; 2]; 2] = [[1.0, 3.0], [0.5, 1.0]];

fn model(ms: &[[[f64; 2]; 2]]) -> CocycleModel {
    CocycleModel::FirstCoordinate {
        matrices: ms.iter().map(|m| m.iter().map(|r| r.to_vec()).collect()).collect(),
    }
}

fn fair_binary_on_four(seed: u64) -> InfiniteWordSource {
    InfiniteWordSource::bernoulli(vec![0.5, 0.5, 0.0, 0.0], seed).expect("valid law")
}

fn trace_plan(horizon: usize) -> AnalysisPlan {
    AnalysisPlan::Trace {
        horizon,
        rules: TraceRules::default(),
        condition: None,
    }
}

fn nolimit(name: &str, schedule: EpochSchedule, citation: &str, description: &str) -> Scenario {
    let x = fair_binary_on_four(7);
    Scenario {
        name: name.into(),
        aliases: vec![],
        citation: citation.into(),
        description: description.into(),
        expected: Outcome::Oscillates,
        source: Some(
            InfiniteWordSource::block_schedule(4, BlockProgram::nolimit(x.clone(), schedule))
                .expect("valid program"),
        ),
        cocycle: model(&[DIAG, DIAG, SWAP, ONES]),
        plan: AnalysisPlan::Trace {
            horizon: 1_000_000,
            rules: TraceRules::default(),
            condition: Some(ConditionProbe {
                sample: x,
                length: 100_000,
                max_ell: 64,
            }),
        },
    }
}

fn positive_returns(name: &str, source: InfiniteWordSource, citation: &str, description: &str) -> Scenario {
    Scenario {
        name: name.into(),
        aliases: vec![],
        citation: citation.into(),
        description: description.into(),
        expected: Outcome::Converges,
        source: Some(source),
        cocycle: model(&[POS_A, POS_B]),
        plan: AnalysisPlan::Returns {
            horizons: vec![100_000, 1_000_000],
            k0: 8,
            cutoffs: vec![8, 16, 32, 64],
            max_ell: 8,
            z_from: 0,
            heavy_cutoff: 64,
            heavy_mass: 0.2,
            rules: TraceRules::default(),
        },
    }
}

/// `α_k`, an evenly spaced grid in `(0,1)`, mapped to `β = log(α/(1−α))`.
fn logit_grid() -> Vec<f64> {
    (0..21)
        .map(|k| 0.05 + 0.045 * k as f64)
        .map(|a: f64| (a / (1.0 - a)).ln())
        .collect()
}

/// Every built-in scenario, in listing order.
pub fn registry() -> Vec<Scenario> {
    vec![
        Scenario {
            name: "fibonacci-periodic".into(),
            aliases: vec![],
            citation: "periodic-orbit formula: Lyapunov exponent of a periodic point equals log ρ / p".into(),
            description: "Fibonacci matrix [[1,1],[1,0]] along the fixed point 0^∞; the exponent converges to log φ ≈ 0.4812.".into(),
            expected: Outcome::Converges,
            source: Some(InfiniteWordSource::periodic(1, "0").expect("valid cycle")),
            cocycle: model(&[[[1.0, 1.0], [1.0, 0.0]]]),
            plan: trace_plan(10_000),
        },
        nolimit(
            "nolimit",
            EpochSchedule::DoublyExponential,
            "example where \"the limit ... doesn't exist\" (blocks u_j v_j with epochs 2^{2^e})",
            "diag(10, 1/10), swap and the all-ones matrix along 3 u_1 v_1 u_2 v_2 ...; first-type epochs grow the norm, second-type epochs flatten it, so the running exponent swings between the two.",
        ),
        nolimit(
            "nolimit-geometric",
            EpochSchedule::Geometric { base: 4 },
            "example where \"the limit ... doesn't exist\", with epochs 4^e instead of 2^{2^e}",
            "The same block identities as `nolimit` with geometric epochs, so that several epoch switches fall inside a desk-scale horizon.",
        ),
        Scenario {
            name: "nolimit-condition".into(),
            aliases: vec![],
            citation: "example where \"the limit ... doesn't exist\": the positivity condition fails on the support of ν".into(),
            description: "Searches windows of a ν-typical word (fair coin on {0,1}) for a strictly positive product of diag(10, 1/10) factors; none exists.".into(),
            expected: Outcome::ConditionFails,
            source: None,
            cocycle: model(&[DIAG, DIAG, SWAP, ONES]),
            plan: AnalysisPlan::Condition {
                probe: ConditionProbe {
                    sample: fair_binary_on_four(7),
                    length: 100_000,
                    max_ell: 64,
                },
            },
        },
        Scenario {
            name: "fx-depth-k".into(),
            aliases: vec![],
            citation: "example with f(x) = exp(−d(0^∞, x)^{−1}): \"liminf = −∞ but limsup > −∞\"".into(),
            description: "A(x) = f(x)·J truncated at depth 16 along blocks (01)^{n_i} 0^{n_i'} with n_i = 4^i, n_i' = ⌈log₂ n_i⌉ (desk preset); set plan lengths to tower/log2_tower for the original schedule.".into(),
            expected: Outcome::Oscillates,
            source: Some(
                InfiniteWordSource::block_schedule(
                    2,
                    BlockProgram::alternating_zeros(LengthRule::Power { base: 4 }, LengthRule::Log2Power { base: 4 }),
                )
                .expect("valid program"),
            ),
            cocycle: CocycleModel::FlatTail { depth: 16 },
            plan: trace_plan(1_000_000),
        },
        Scenario {
            name: "gap-blocks".into(),
            aliases: vec!["walters-gap-blocks".into()],
            citation: "example where \"z is a generic point for ν\" with ν = (ν₁+ν₂)/2: the long-word lemma's conclusion does not hold".into(),
            description: "z = u_1 v_1 u_2 v_2 ... with u_j, v_j prefixes of Bernoulli words on {0,1} and {2,3}; returns to a marker inside a u-block are separated by whole v-blocks, so long return words keep a fixed share of the orbit.".into(),
            expected: Outcome::HeavyReturns,
            source: Some(
                InfiniteWordSource::block_schedule(
                    4,
                    BlockProgram::gap(
                        InfiniteWordSource::bernoulli(vec![0.5, 0.5, 0.0, 0.0], 11).expect("valid law"),
                        InfiniteWordSource::bernoulli(vec![0.0, 0.0, 0.5, 0.5], 13).expect("valid law"),
                    ),
                )
                .expect("valid program"),
            ),
            cocycle: model(&[POS_A, POS_B, [[1.0, 2.0], [2.0, 1.0]], [[3.0, 1.0], [1.0, 2.0]]]),
            plan: AnalysisPlan::Returns {
                horizons: vec![100_000, 1_000_000],
                k0: 8,
                cutoffs: vec![8, 16, 32, 64],
                max_ell: 8,
                z_from: 380,
                heavy_cutoff: 32,
                heavy_mass: 0.2,
                rules: TraceRules::default(),
            },
        },
        Scenario {
            name: "nonergodic-4".into(),
            aliases: vec![],
            citation: "four-matrix non-ergodic example with a = 10, b = 1/10: \"A_1^n A_2^n = diag(100^n, 100^{−n})\"".into(),
            description: "Symbols 0..3 stand for the four matrices diag(10, 1/10), diag(10, 1/10), the all-ones matrix and the swap, along u_1 v_1 w_1 u_2 v_2 w_2 ... with u_j = 0^j, v_j = 1^j, w_j = 2^j and a swap after u_j, v_j in second-type epochs.".into(),
            expected: Outcome::Oscillates,
            source: Some(
                InfiniteWordSource::block_schedule(4, BlockProgram::nonergodic_four(EpochSchedule::DoublyExponential))
                    .expect("valid program"),
            ),
            cocycle: model(&[DIAG, DIAG, ONES, SWAP]),
            plan: trace_plan(1_000_000),
        },
        positive_returns(
            "thue-morse-positive",
            InfiniteWordSource::thue_morse(),
            "uniquely ergodic example: \"the Thue-Morse sequence\"",
            "A positive pair along the Thue–Morse word; the trace and the return-word estimate agree within the correction band.",
        ),
        positive_returns(
            "squarefree-positive",
            InfiniteWordSource::squarefree(1 << 21).expect("valid capacity"),
            "generic point example: \"square of the Möbius function\"",
            "A positive pair along ω_k = μ(k+1)²; the trace and the return-word estimate agree within the correction band.",
        ),
        Scenario {
            name: "besicovitch".into(),
            aliases: vec!["besicovitch-eggleston".into()],
            citation: "Besicovitch–Eggleston corollary: dimension of the level sets of binary digit frequencies".into(),
            description: "Weighted average with potential f(a, b) = b on {0,1}; the Legendre spectrum equals H(α)/log 2.".into(),
            expected: Outcome::Converges,
            source: None,
            cocycle: CocycleModel::Weighted {
                spec: WeightedAverageSpec::besicovitch(),
            },
            plan: AnalysisPlan::Spectrum {
                betas: logit_grid(),
                horizon: 4096,
                step: None,
                oracle: Some(SpectrumOracle::BinaryEntropy { tolerance: 1e-3 }),
            },
        },
        Scenario {
            name: "zero-product".into(),
            aliases: vec![],
            citation: "first alternative of the main dichotomy: the exponent is −∞ when products vanish".into(),
            description: "All-ones and nilpotent [[0,1],[0,0]] under a fair coin; two consecutive nilpotent factors kill the product.".into(),
            expected: Outcome::MinusInfinity,
            source: Some(InfiniteWordSource::bernoulli(vec![0.5, 0.5], 5).expect("valid law")),
            cocycle: model(&[ONES, [[0.0, 1.0], [0.0, 0.0]]]),
            plan: trace_plan(10_000),
        },
    ]
}

/// Looks a scenario up by name or alias.
pub fn find(name: &str) -> Result<Scenario> {
    registry()
        .into_iter()
        .find(|s| s.name == name || s.aliases.iter().any(|a| a == name))
        .ok_or_else(|| Error::Config(format!("unknown scenario `{name}`; try `list`")))
}
