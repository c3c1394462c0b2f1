use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{AnalysisPlan, Outcome, Scenario, SpectrumOracle, TraceRules};
use crate::cocycle::{geometric_checkpoints, LyapunovTrace};
use crate::error::{Error, Result};
use crate::multifractal::SpectrumCurve;

/// Expected against observed behaviour, with a one-line explanation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub scenario: String,
    pub expected: Outcome,
    pub observed: Outcome,
    pub detail: String,
}

impl Verdict {
    pub fn matches(&self) -> bool {
        self.expected == self.observed
    }

    pub fn line(&self) -> String {
        format!(
            "{}: expected {}, observed {} ({}) [{}]",
            self.scenario,
            self.expected.tag(),
            self.observed.tag(),
            self.detail,
            if self.matches() { "OK" } else { "MISMATCH" }
        )
    }
}

/// Classifies a trace: a vanishing product, then a late-window spread above
/// the oscillation gap, then agreement of the last two geometric checkpoints.
pub fn trace_verdict(trace: &LyapunovTrace, rules: &TraceRules) -> (Outcome, String) {
    if let Some(z) = trace.zero_index() {
        // reported at checkpoint resolution so that a trace read back from
        // CSV gives the same line
        let at = trace.checkpoints().iter().find(|&&n| n >= z).copied().unwrap_or(z);
        return (Outcome::MinusInfinity, format!("product is zero at checkpoint n = {at}"));
    }
    let Some(&horizon) = trace.checkpoints().last() else {
        return (Outcome::Inconclusive, "empty trace".into());
    };
    let exps = trace.exponents();
    let late: Vec<f64> = trace
        .checkpoints()
        .iter()
        .zip(&exps)
        .filter(|(n, _)| **n as f64 >= rules.late_fraction * horizon as f64)
        .map(|(_, e)| *e)
        .collect();
    let hi = late.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = late.iter().copied().fold(f64::INFINITY, f64::min);
    let gap = hi - lo;
    if gap > rules.oscillation_gap {
        return (
            Outcome::Oscillates,
            format!("late-window exponents span [{lo:.4}, {hi:.4}], gap {gap:.4}"),
        );
    }
    let grid = geometric_checkpoints(rules.geometric_start, horizon);
    let last = exps[exps.len() - 1];
    let previous = grid
        .len()
        .checked_sub(2)
        .map(|i| grid[i])
        .and_then(|n| trace.checkpoints().iter().position(|&c| c == n))
        .map(|i| exps[i]);
    match previous {
        Some(prev) if (last - prev).abs() <= rules.convergence_tol * last.abs().max(1.0) => (
            Outcome::Converges,
            format!("exponent {last:.6} at n = {horizon}, previous checkpoint {prev:.6}"),
        ),
        Some(prev) => (
            Outcome::Inconclusive,
            format!("exponent {last:.6} at n = {horizon}, previous checkpoint {prev:.6}, late gap {gap:.4}"),
        ),
        None => (Outcome::Inconclusive, "trace lacks the geometric checkpoints".into()),
    }
}

/// Heavy returns when every `(horizon, long-word mass)` exceeds `heavy_mass`;
/// otherwise the trace decides.
pub fn returns_verdict(
    masses: &[(usize, f64)],
    heavy_mass: f64,
    trace: (Outcome, String),
) -> (Outcome, String) {
    let list = masses
        .iter()
        .map(|(h, m)| format!("{m:.3} at {h}"))
        .collect::<Vec<_>>()
        .join(", ");
    if !masses.is_empty() && masses.iter().all(|&(_, m)| m > heavy_mass) {
        (Outcome::HeavyReturns, format!("long-word mass {list}"))
    } else {
        (trace.0, format!("{}; long-word mass {list}", trace.1))
    }
}

fn binary_entropy(a: f64) -> f64 {
    if a <= 0.0 || a >= 1.0 {
        return 0.0;
    }
    -(a * a.ln() + (1.0 - a) * (1.0 - a).ln()) / 2f64.ln()
}

pub fn spectrum_verdict(curve: &SpectrumCurve, oracle: Option<&SpectrumOracle>) -> (Outcome, String) {
    let finite = curve
        .points
        .iter()
        .all(|p| [p.beta, p.psi, p.alpha, p.dim].iter().all(|x| x.is_finite()));
    let flagged = curve.flagged().count();
    if !finite || curve.points.is_empty() {
        return (Outcome::Inconclusive, "spectrum has non-finite points".into());
    }
    match oracle {
        None if flagged == 0 => (Outcome::Converges, format!("{} points", curve.points.len())),
        None => (Outcome::Inconclusive, format!("{flagged} points outside the spectrum")),
        Some(SpectrumOracle::BinaryEntropy { tolerance }) => {
            let err = curve
                .points
                .iter()
                .map(|p| (p.dim - binary_entropy(p.alpha)).abs())
                .fold(0.0, f64::max);
            let outcome = if err <= *tolerance && flagged == 0 {
                Outcome::Converges
            } else {
                Outcome::Inconclusive
            };
            (outcome, format!("max |dim − H(α)/log 2| = {err:.2e}"))
        }
    }
}

pub fn condition_verdict(witness_found: bool) -> (Outcome, String) {
    if witness_found {
        (Outcome::ConditionHolds, "a strictly positive window was found".into())
    } else {
        (Outcome::ConditionFails, "no strictly positive window in the sample".into())
    }
}

fn read(dir: &Path, file: &str) -> Result<std::fs::File> {
    std::fs::File::open(dir.join(file))
        .map_err(|e| Error::Io(format!("{}: {e}", dir.join(file).display())))
}

/// Recomputes the verdict of a finished run from the files it wrote.
pub fn verdict_from_dir(dir: impl AsRef<Path>) -> Result<Verdict> {
    let dir = dir.as_ref();
    let text = std::fs::read_to_string(dir.join(super::SCENARIO_FILE))?;
    let scenario = Scenario::from_toml(&text)?;
    let (observed, detail) = match &scenario.plan {
        AnalysisPlan::Trace { rules, .. } => {
            trace_verdict(&LyapunovTrace::read_csv(read(dir, "trace.csv")?)?, rules)
        }
        AnalysisPlan::Returns {
            heavy_mass, rules, ..
        } => {
            let trace = trace_verdict(&LyapunovTrace::read_csv(read(dir, "trace.csv")?)?, rules);
            let doc: serde_json::Value = serde_json::from_reader(read(dir, "returns.json")?)?;
            let masses = doc["horizons"]
                .as_array()
                .ok_or_else(|| Error::Io("returns.json has no horizons".into()))?
                .iter()
                .map(|h| {
                    Some((h["horizon"].as_u64()? as usize, h["heavy_long_mass"].as_f64()?))
                })
                .collect::<Option<Vec<_>>>()
                .ok_or_else(|| Error::Io("malformed horizon entry in returns.json".into()))?;
            returns_verdict(&masses, *heavy_mass, trace)
        }
        AnalysisPlan::Spectrum { oracle, .. } => {
            spectrum_verdict(&SpectrumCurve::read_csv(read(dir, "spectrum.csv")?)?, oracle.as_ref())
        }
        AnalysisPlan::Condition { .. } => {
            let doc: serde_json::Value = serde_json::from_reader(read(dir, "condition.json")?)?;
            condition_verdict(!doc["witness"].is_null())
        }
    };
    Ok(Verdict {
        scenario: scenario.name,
        expected: scenario.expected,
        observed,
        detail,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trace(f: impl Fn(f64) -> f64, horizon: usize) -> LyapunovTrace {
        let n = geometric_checkpoints(16, horizon);
        let v = n.iter().map(|&k| k as f64 * f(k as f64)).collect();
        LyapunovTrace::new(n, v, None).unwrap()
    }

    #[test]
    fn classifies_synthetic_traces() {
        let rules = TraceRules::default();
        assert_eq!(trace_verdict(&trace(|n| 0.5 + 1.0 / n, 1 << 20), &rules).0, Outcome::Converges);
        // the last two grid points (a factor √2 apart) differ by 1.6e-3
        assert_eq!(trace_verdict(&trace(|n| 1.0 + 4e3 / n, 1 << 20), &rules).0, Outcome::Inconclusive);
        let swing = |n: f64| if (n.log2() as u64) % 2 == 0 { 0.0 } else { 1.5 };
        assert_eq!(trace_verdict(&trace(swing, 1 << 20), &rules).0, Outcome::Oscillates);
        let zero = LyapunovTrace::new(vec![16, 32], vec![1.0, f64::NEG_INFINITY], Some(20)).unwrap();
        let (o, detail) = trace_verdict(&zero, &rules);
        assert_eq!(o, Outcome::MinusInfinity);
        assert!(detail.contains("n = 32"));
    }

    #[test]
    fn returns_and_condition() {
        let ok = (Outcome::Converges, String::new());
        assert_eq!(returns_verdict(&[(10, 0.5), (20, 0.3)], 0.2, ok.clone()).0, Outcome::HeavyReturns);
        assert_eq!(returns_verdict(&[(10, 0.5), (20, 0.1)], 0.2, ok).0, Outcome::Converges);
        assert_eq!(condition_verdict(false).0, Outcome::ConditionFails);
        assert_eq!(condition_verdict(true).0, Outcome::ConditionHolds);
    }
}
