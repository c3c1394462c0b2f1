//! The `cocycle` command line.
//!
//! Exit status: 0 on success (and, for `run` and `verdict`, when the
//! observed outcome matches the expected one), 2 for configuration errors
//! (bad flags, unknown scenario, invalid override or config file), 3 when a
//! computation fails, 4 when a scenario's verdict does not match.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::cocycle::{
    check_positivity_condition, check_positivity_exhaustive, geometric_checkpoints,
    linear_checkpoints, lyapunov_trace,
};
use crate::error::{Error, Result};
use crate::multifractal::{spectrum_curve, WeightedAverageSpec};
use crate::returnformula::{
    return_formula_estimate, select_marker_from, ReturnFormulaReport,
};
use crate::scenario::{self, write_atomic, CocycleModel, ScenarioSummary};
use crate::symbolic::InfiniteWordSource;

pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_COMPUTATION: i32 = 3;
pub const EXIT_MISMATCH: i32 = 4;

/// Environment variable holding the default output directory of `run`.
pub const OUT_ENV: &str = "COCYCLE_OUT";

#[derive(Parser, Debug)]
#[command(name = "cocycle", version, about = "Lyapunov exponents of non-negative matrix cocycles")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a registered scenario and print its verdict.
    Run {
        scenario: String,
        /// `key=value` with a dotted key into the scenario's TOML form.
        #[arg(long = "override", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
        /// Run a scenario file instead of a registered name.
        #[arg(long, conflicts_with = "scenario")]
        file: Option<PathBuf>,
        #[arg(long, env = OUT_ENV, default_value = "cocycle-out")]
        out: PathBuf,
    },
    /// List registered scenarios.
    List {
        #[arg(long)]
        json: bool,
    },
    /// Print a scenario's TOML form, e.g. as a starting point for `run --file`.
    Show { scenario: String },
    /// Recompute the verdict from a finished run directory.
    Verdict { dir: PathBuf },
    /// Running exponent (1/n) log ‖A^{(n)}‖ at checkpoints, as CSV.
    Trace {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        horizon: usize,
        /// First point of the doubling grid.
        #[arg(long, default_value_t = 16)]
        start: usize,
        /// Extra evenly spaced checkpoints every `step` symbols.
        #[arg(long)]
        step: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Return-word estimate of the exponent, as JSON.
    Returns {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        horizon: usize,
        #[arg(long)]
        k0: usize,
        /// Long-word cutoff M.
        #[arg(long)]
        cutoff: usize,
        #[arg(long, default_value_t = 16)]
        max_ell: usize,
        /// Take z at the first occurrence of u from this position on.
        #[arg(long, default_value_t = 0)]
        z_from: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// (β, ψ, α, dim) along a β grid, as CSV.
    Spectrum {
        /// A weighted-average TOML file.
        #[arg(long)]
        config: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        beta_min: f64,
        #[arg(long, allow_hyphen_values = true)]
        beta_max: f64,
        #[arg(long, default_value_t = 41)]
        points: usize,
        #[arg(long, default_value_t = 4096)]
        horizon: usize,
        /// Finite-difference step; defaults to 1e-3 (1 + |β|).
        #[arg(long)]
        step: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Search for a strictly positive product A^{(ℓ)}, ℓ ≤ max-ell.
    Check {
        #[arg(long)]
        config: PathBuf,
        /// Symbols of the source to scan; ignored with --exhaustive.
        #[arg(long, default_value_t = 100_000)]
        length: usize,
        #[arg(long, default_value_t = 16)]
        max_ell: usize,
        /// Scan every word instead of the source's windows.
        #[arg(long)]
        exhaustive: bool,
    },
}

/// Model files for `trace`, `returns` and `check`: a `[source]` and a
/// `[cocycle]` table, as in a scenario file.
#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub source: Option<InfiniteWordSource>,
    pub cocycle: CocycleModel,
}

fn read_config(path: &Path) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))
}

fn load_model(path: &Path) -> Result<ModelConfig> {
    Ok(toml::from_str(&read_config(path)?)?)
}

fn require_source(m: &ModelConfig) -> Result<&InfiniteWordSource> {
    m.source
        .as_ref()
        .ok_or_else(|| Error::Config("config file has no [source] table".into()))
}

fn emit(out: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match out {
        Some(p) => write_atomic(p, bytes),
        None => Ok(std::io::stdout().write_all(bytes)?),
    }
}

fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Config(_) => EXIT_CONFIG,
        _ => EXIT_COMPUTATION,
    }
}

/// Parses `args` (program name first) and runs the command, returning the
/// process exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { 0 };
        }
    };
    match execute(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn execute(command: Command) -> Result<i32> {
    match command {
        Command::Run {
            scenario,
            overrides,
            file,
            out,
        } => {
            let base = match file {
                Some(f) => scenario::Scenario::from_toml(&read_config(&f)?)?,
                None => scenario::find(&scenario)?,
            };
            let s = base.with_overrides(&overrides)?;
            let report = scenario::run_scenario(&s, &out)?;
            println!("{}", report.verdict.line());
            Ok(if report.verdict.matches() { 0 } else { EXIT_MISMATCH })
        }
        Command::List { json } => {
            let rows: Vec<ScenarioSummary> = scenario::registry().iter().map(Into::into).collect();
            if json {
                println!("{}", serde_json::to_string_pretty(&rows)?);
            } else {
                let width = rows.iter().map(|r| r.name.len()).max().unwrap_or(0);
                for r in &rows {
                    println!("{:width$}  {:15}  {}", r.name, r.expected.tag(), r.citation);
                }
            }
            Ok(0)
        }
        Command::Show { scenario: name } => {
            print!("{}", scenario::find(&name)?.to_toml()?);
            Ok(0)
        }
        Command::Verdict { dir } => {
            let v = scenario::verdict_from_dir(&dir)?;
            println!("{}", v.line());
            Ok(if v.matches() { 0 } else { EXIT_MISMATCH })
        }
        Command::Trace {
            config,
            horizon,
            start,
            step,
            out,
        } => {
            let m = load_model(&config)?;
            let spec = m.cocycle.build()?;
            let mut grid = geometric_checkpoints(start, horizon);
            if let Some(s) = step {
                grid.extend(linear_checkpoints(s, horizon));
                grid.sort_unstable();
                grid.dedup();
            }
            let trace = lyapunov_trace(&spec, require_source(&m)?, &grid)?;
            let mut csv = Vec::new();
            trace.write_csv(&mut csv)?;
            emit(out.as_deref(), &csv)?;
            Ok(0)
        }
        Command::Returns {
            config,
            horizon,
            k0,
            cutoff,
            max_ell,
            z_from,
            out,
        } => {
            let m = load_model(&config)?;
            let spec = m.cocycle.build()?;
            let prefix = require_source(&m)?.emit_prefix(horizon + spec.depth() - 1)?;
            let head = &prefix[..horizon];
            let selection = select_marker_from(&spec, head, k0, max_ell, z_from)?;
            let estimate = return_formula_estimate(&spec, head, &selection, cutoff)?;
            let mut json = Vec::new();
            ReturnFormulaReport { selection, estimate }.write_json(&mut json)?;
            json.push(b'\n');
            emit(out.as_deref(), &json)?;
            Ok(0)
        }
        Command::Spectrum {
            config,
            beta_min,
            beta_max,
            points,
            horizon,
            step,
            out,
        } => {
            let spec = WeightedAverageSpec::from_toml(&read_config(&config)?)?;
            if points < 2 || !(beta_min < beta_max) {
                return Err(Error::Config("need beta-min < beta-max and at least 2 points".into()));
            }
            let betas: Vec<f64> = (0..points)
                .map(|k| beta_min + (beta_max - beta_min) * k as f64 / (points - 1) as f64)
                .collect();
            let curve = spectrum_curve(&spec, &betas, horizon, step)?;
            let mut csv = Vec::new();
            curve.write_csv(&mut csv)?;
            emit(out.as_deref(), &csv)?;
            Ok(0)
        }
        Command::Check {
            config,
            length,
            max_ell,
            exhaustive,
        } => {
            let m = load_model(&config)?;
            let spec = m.cocycle.build()?;
            let witness = if exhaustive {
                check_positivity_exhaustive(&spec, max_ell)?
            } else {
                let sample = require_source(&m)?.emit_prefix(length)?;
                check_positivity_condition(&spec, &sample, max_ell)?
            };
            match witness {
                Some(w) => println!(
                    "witness u = {} with ℓ0 = {}, b = {:e}{}",
                    w.u,
                    w.ell0,
                    w.b(),
                    w.position.map(|p| format!(", first seen at {p}")).unwrap_or_default()
                ),
                None => println!("no positive product A^(ℓ) with ℓ ≤ {max_ell}"),
            }
            Ok(0)
        }
    }
}
