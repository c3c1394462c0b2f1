use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::json;

use super::verdict::{condition_verdict, returns_verdict, spectrum_verdict, trace_verdict};
use super::{AnalysisPlan, CocycleModel, ConditionProbe, Scenario, TraceRules, Verdict};
use crate::cocycle::{
    check_positivity_condition, geometric_checkpoints, linear_checkpoints, lyapunov_trace,
    lyapunov_trace_prefix, CocycleSpec, PositivityWitness,
};
use crate::error::{Error, Result};
use crate::multifractal::spectrum_curve;
use crate::returnformula::{
    periodic_exponent, quasi_multiplicativity_check, return_formula_estimates, select_marker_from,
    MarkerSelection, ReturnFormulaEstimate,
};
use crate::symbolic::{InfiniteWordSource, SourceKind};

/// Name of the effective configuration written next to the artifacts.
pub const SCENARIO_FILE: &str = "scenario.toml";

/// Outcome of [`run_scenario`].
#[derive(Clone, Debug)]
pub struct RunReport {
    pub verdict: Verdict,
    pub artifacts: Vec<PathBuf>,
}

/// Writes `bytes` to `path` through a temporary file in the same directory
/// and a rename, so readers never see a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.persist(path).map_err(|e| Error::Io(e.to_string()))?;
    Ok(())
}

struct Artifacts {
    dir: PathBuf,
    written: Vec<PathBuf>,
}

impl Artifacts {
    fn put(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        let path = self.dir.join(name);
        write_atomic(&path, bytes)?;
        self.written.push(path);
        Ok(())
    }

    fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let mut bytes = serde_json::to_vec_pretty(value)?;
        bytes.push(b'\n');
        self.put(name, &bytes)
    }
}

fn need_source(s: &Scenario) -> Result<&InfiniteWordSource> {
    s.source
        .as_ref()
        .ok_or_else(|| Error::Config(format!("scenario {} has no word source", s.name)))
}

fn trace_grid(horizon: usize, rules: &TraceRules) -> Vec<usize> {
    let mut grid = geometric_checkpoints(rules.geometric_start, horizon);
    grid.extend(linear_checkpoints(horizon / rules.linear_points.max(1), horizon));
    grid.sort_unstable();
    grid.dedup();
    grid
}

#[derive(Serialize)]
struct WitnessRecord {
    u: String,
    ell0: usize,
    position: Option<usize>,
    log_b: f64,
}

fn probe(spec: &CocycleSpec, probe: &ConditionProbe) -> Result<Option<PositivityWitness>> {
    if probe.sample.alphabet() != spec.alphabet() {
        return Err(Error::Config("condition sample and cocycle use different alphabets".into()));
    }
    let sample = probe.sample.emit_prefix(probe.length)?;
    check_positivity_condition(spec, &sample, probe.max_ell)
}

fn witness_json(w: &Option<PositivityWitness>) -> serde_json::Value {
    json!({
        "witness": w.as_ref().map(|w| WitnessRecord {
            u: w.u.to_string(),
            ell0: w.ell0,
            position: w.position,
            log_b: w.log_b,
        })
    })
}

#[derive(Serialize)]
struct HorizonReport {
    horizon: usize,
    selection: MarkerSelection,
    heavy_long_mass: f64,
    estimates: Vec<ReturnFormulaEstimate>,
}

/// Runs `scenario`, writing its configuration and artifacts into `out`.
///
/// Artifact contents depend only on the scenario (seeds included), so two
/// runs of the same configuration produce identical files.
pub fn run_scenario(scenario: &Scenario, out: &Path) -> Result<RunReport> {
    std::fs::create_dir_all(out)?;
    let mut art = Artifacts {
        dir: out.to_path_buf(),
        written: Vec::new(),
    };
    art.put(SCENARIO_FILE, scenario.to_toml()?.as_bytes())?;

    let (observed, detail) = match &scenario.plan {
        AnalysisPlan::Trace {
            horizon,
            rules,
            condition,
        } => {
            let spec = scenario.cocycle.build()?;
            let source = need_source(scenario)?;
            let trace = lyapunov_trace(&spec, source, &trace_grid(*horizon, rules))?;
            let mut csv = Vec::new();
            trace.write_csv(&mut csv)?;
            art.put("trace.csv", &csv)?;
            let mut summary = json!({ "final_exponent": trace.final_exponent() });
            if let SourceKind::Periodic { cycle } = source.kind() {
                summary["periodic_exponent"] = json!(periodic_exponent(&spec, cycle)?);
            }
            if let Some(p) = condition {
                let w = probe(&spec, p)?;
                summary["condition"] = witness_json(&w);
                art.json("condition.json", &witness_json(&w))?;
            }
            art.json("summary.json", &summary)?;
            trace_verdict(&trace, rules)
        }
        AnalysisPlan::Returns {
            horizons,
            k0,
            cutoffs,
            max_ell,
            z_from,
            heavy_cutoff,
            heavy_mass,
            rules,
        } => {
            let spec = scenario.cocycle.build()?;
            let source = need_source(scenario)?;
            let top = *horizons
                .iter()
                .max()
                .ok_or_else(|| Error::Config("returns plan lists no horizons".into()))?;
            let prefix = source.emit_prefix(top + spec.depth() - 1)?;
            let mut cuts = cutoffs.clone();
            cuts.push(*heavy_cutoff);
            cuts.sort_unstable();
            cuts.dedup();

            let mut reports = Vec::new();
            for &h in horizons {
                let head = &prefix[..h];
                let selection = select_marker_from(&spec, head, *k0, *max_ell, *z_from)?;
                let estimates = return_formula_estimates(&spec, head, &selection, &cuts)?;
                let heavy_long_mass = estimates
                    .iter()
                    .find(|e| e.cutoff == *heavy_cutoff)
                    .map(|e| e.long_mass)
                    .unwrap_or_default();
                reports.push(HorizonReport {
                    horizon: h,
                    selection,
                    heavy_long_mass,
                    estimates,
                });
            }
            let last = reports.iter().max_by_key(|r| r.horizon).unwrap();
            let best = last.estimates.last().unwrap();
            let mut grid = trace_grid(top, rules);
            grid.extend(reports.iter().map(|r| r.estimates[0].tau_i));
            grid.sort_unstable();
            grid.dedup();
            let trace = lyapunov_trace_prefix(&spec, &prefix, &grid)?;
            let at_tau = trace
                .checkpoints()
                .iter()
                .position(|&n| n == best.tau_i)
                .map(|i| trace.values()[i] / best.tau_i as f64)
                .unwrap();
            let ell = last.selection.u.len().max(*k0);
            let qm = quasi_multiplicativity_check(&spec, &prefix[..last.horizon], &last.selection, ell)?;
            let cross_check = json!({
                "horizon": last.horizon,
                "cutoff": best.cutoff,
                "estimate": best.estimate,
                "trace_exponent": at_tau,
                "correction_band": best.correction_band,
                "difference": (best.estimate - at_tau).abs(),
                "within_band_plus_0.05": (best.estimate - at_tau).abs() <= best.correction_band + 5e-2,
            });
            let masses: Vec<(usize, f64)> =
                reports.iter().map(|r| (r.horizon, r.heavy_long_mass)).collect();
            art.json(
                "returns.json",
                &json!({
                    "horizons": reports,
                    "cross_check": cross_check,
                    "quasi_multiplicativity": {
                        "ell": qm.ell,
                        "rows": qm.rows.len(),
                        "min_ratio": qm.min_ratio,
                        "max_ratio": qm.max_ratio,
                        "c1": last.selection.c1(),
                    },
                }),
            )?;
            let mut csv = Vec::new();
            trace.write_csv(&mut csv)?;
            art.put("trace.csv", &csv)?;
            returns_verdict(&masses, *heavy_mass, trace_verdict(&trace, rules))
        }
        AnalysisPlan::Spectrum {
            betas,
            horizon,
            step,
            oracle,
        } => {
            let CocycleModel::Weighted { spec } = &scenario.cocycle else {
                return Err(Error::Config("spectrum plans need a weighted cocycle model".into()));
            };
            let curve = spectrum_curve(spec, betas, *horizon, *step)?;
            let mut csv = Vec::new();
            curve.write_csv(&mut csv)?;
            art.put("spectrum.csv", &csv)?;
            spectrum_verdict(&curve, oracle.as_ref())
        }
        AnalysisPlan::Condition { probe: p } => {
            let spec = scenario.cocycle.build()?;
            let w = probe(&spec, p)?;
            art.json("condition.json", &witness_json(&w))?;
            condition_verdict(w.is_some())
        }
    };
    Ok(RunReport {
        verdict: Verdict {
            scenario: scenario.name.clone(),
            expected: scenario.expected,
            observed,
            detail,
        },
        artifacts: art.written,
    })
}
