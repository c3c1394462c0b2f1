use std::collections::BTreeMap;
use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use super::MarkerSelection;
use crate::cocycle::{partial_product, CocycleSpec};
use crate::error::{Error, Result};
use crate::matproc::{LogMatrix, ScaledProduct};
use crate::symbolic::{decompose_returns, long_word_mass, Symbol};

/// Count and mean log-norm of the return words of one length.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WordStats {
    pub count: usize,
    /// Mean of `log ‖A^{(|ζ|)}‖` over the words with a nonzero product.
    pub mean_log_norm: Option<f64>,
}

/// Finite-horizon version of the return-word formula for `L(ω)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReturnFormulaEstimate {
    /// Index of the last return used.
    pub i: usize,
    pub tau_i: usize,
    /// Length cutoff `M`.
    pub cutoff: usize,
    /// `Σ log ‖A^{(τ_{j−1},τ_j)}‖` over `j = 0` and the `j ≥ 1` with `|ζ_j| ≤ M`.
    pub short_sum: f64,
    /// Same sum over the long words, kept for diagnostics.
    pub long_sum: f64,
    pub long_mass: f64,
    /// `short_sum / τ_i`.
    pub estimate: f64,
    /// `(i/τ_i) |log c_1|`.
    pub correction_band: f64,
    /// Some block product vanished; such blocks are left out of the sums.
    pub mixed_support: bool,
    pub zero_blocks: usize,
    /// Return-word length → statistics, over `ζ_1, …, ζ_i`.
    pub histogram: BTreeMap<usize, WordStats>,
}

impl ReturnFormulaEstimate {
    /// Interval that must contain `log ‖A^{(τ_i)}‖ / τ_i`, given the
    /// per-step norm bound `c2` (`|log ‖A^{(n,m)}‖| ≤ c2 (m − n)`).
    pub fn sandwich(&self, c2: f64) -> (f64, f64) {
        let tail = c2 * self.long_mass * (1.0 + self.cutoff as f64 / self.tau_i as f64);
        let slack = self.correction_band + tail;
        (self.estimate - slack, self.estimate + slack)
    }
}

/// Selection plus estimate, the unit of JSON export.
#[derive(Clone, Debug, Serialize)]
pub struct ReturnFormulaReport {
    pub selection: MarkerSelection,
    pub estimate: ReturnFormulaEstimate,
}

impl ReturnFormulaReport {
    pub fn write_json<W: Write>(&self, writer: W) -> Result<()> {
        serde_json::to_writer_pretty(writer, self)?;
        Ok(())
    }
}

/// Splits `prefix` at its returns to `[v]` and sums block log-norms.
///
/// Uses the convention `τ_{−1} = 0`, so `ζ_0` always contributes to the
/// short sum whatever its length.
pub fn return_formula_estimate(
    spec: &CocycleSpec,
    prefix: &[Symbol],
    sel: &MarkerSelection,
    cutoff: usize,
) -> Result<ReturnFormulaEstimate> {
    Ok(return_formula_estimates(spec, prefix, sel, &[cutoff])?.remove(0))
}

/// [`return_formula_estimate`] for several cutoffs, computing the block
/// products once.
pub fn return_formula_estimates(
    spec: &CocycleSpec,
    prefix: &[Symbol],
    sel: &MarkerSelection,
    cutoffs: &[usize],
) -> Result<Vec<ReturnFormulaEstimate>> {
    let decomp = decompose_returns(prefix, &sel.v)?;
    if decomp.return_times().len() < 2 {
        return Err(Error::InvalidParameter(format!(
            "marker returns only once within {} symbols",
            prefix.len()
        )));
    }
    let times = decomp.return_times();
    let blocks: Vec<(usize, usize)> = std::iter::once((0, times[0]))
        .chain(times.windows(2).map(|w| (w[0], w[1])))
        .collect();
    let logs = blocks
        .par_iter()
        .map(|&(a, b)| Ok(partial_product(spec, prefix, a, b)?.log_norm()))
        .collect::<Result<Vec<f64>>>()?;

    let mut acc: BTreeMap<usize, (usize, usize, f64)> = BTreeMap::new();
    for (&(a, b), &log) in blocks.iter().zip(&logs).skip(1) {
        let e = acc.entry(b - a).or_default();
        e.0 += 1;
        if log.is_finite() {
            e.1 += 1;
            e.2 += log;
        }
    }
    let histogram: BTreeMap<usize, WordStats> = acc
        .into_iter()
        .map(|(len, (count, finite, sum))| {
            let mean_log_norm = (finite > 0).then(|| sum / finite as f64);
            (len, WordStats { count, mean_log_norm })
        })
        .collect();
    let zero_blocks = logs.iter().filter(|l| !l.is_finite()).count();
    let i = decomp.last_index();
    let tau_i = decomp.last_return_time();

    Ok(cutoffs
        .iter()
        .map(|&cutoff| {
            let (mut short_sum, mut long_sum) = (0.0, 0.0);
            for (j, (&(a, b), &log)) in blocks.iter().zip(&logs).enumerate() {
                if !log.is_finite() {
                    continue;
                }
                if j == 0 || b - a <= cutoff {
                    short_sum += log;
                } else {
                    long_sum += log;
                }
            }
            ReturnFormulaEstimate {
                i,
                tau_i,
                cutoff,
                short_sum,
                long_sum,
                long_mass: long_word_mass(&decomp, cutoff),
                estimate: short_sum / tau_i as f64,
                correction_band: i as f64 / tau_i as f64 * sel.log_c1.abs(),
                mixed_support: zero_blocks > 0,
                zero_blocks,
                histogram: histogram.clone(),
            }
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QuasiMultiplicativityRow {
    pub j: usize,
    pub tau: usize,
    /// `log( ‖A^{(τ_j+ℓ)}‖ / (‖A^{(τ_j)}‖ ‖A^{(τ_j,τ_j+ℓ)}‖) )`.
    pub log_ratio: f64,
}

impl QuasiMultiplicativityRow {
    pub fn ratio(&self) -> f64 {
        self.log_ratio.exp()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QuasiMultiplicativityReport {
    pub ell: usize,
    pub rows: Vec<QuasiMultiplicativityRow>,
    pub min_ratio: Option<f64>,
    pub max_ratio: Option<f64>,
}

/// The splitting ratio at every return time `τ_j` for which the prefix
/// holds `τ_j + ℓ` steps; rows whose products vanish are left out.
pub fn quasi_multiplicativity_check(
    spec: &CocycleSpec,
    prefix: &[Symbol],
    sel: &MarkerSelection,
    ell: usize,
) -> Result<QuasiMultiplicativityReport> {
    if ell < sel.u.len() {
        return Err(Error::InvalidParameter(format!(
            "probe length {ell} is shorter than the positivity word ({})",
            sel.u.len()
        )));
    }
    let decomp = decompose_returns(prefix, &sel.v)?;
    let reach = prefix.len().saturating_sub(spec.depth() - 1);
    let taus: Vec<usize> = decomp
        .return_times()
        .iter()
        .copied()
        .take_while(|&t| t + ell <= reach)
        .collect();

    // unit-norm copies of A^{(τ_j)}, from one pass along the prefix
    let mut heads = Vec::with_capacity(taus.len());
    let mut running = ScaledProduct::identity(spec.dim());
    let mut at = 0;
    for &t in &taus {
        running = running.concat(&partial_product(spec, prefix, at, t)?)?;
        at = t;
        heads.push(if running.is_zero() {
            None
        } else {
            Some(LogMatrix::from_log_entries(spec.dim(), running.unit_log_entries().to_vec())?)
        });
    }
    let rows = taus
        .par_iter()
        .zip(heads.par_iter())
        .enumerate()
        .map(|(j, (&tau, head))| -> Result<Option<QuasiMultiplicativityRow>> {
            let Some(head) = head else { return Ok(None) };
            let tail = partial_product(spec, prefix, tau, tau + ell)?;
            if tail.is_zero() {
                return Ok(None);
            }
            let joined = ScaledProduct::from_factor(head).concat(&tail)?;
            Ok(Some(QuasiMultiplicativityRow {
                j,
                tau,
                log_ratio: joined.log_norm() - tail.log_norm(),
            }))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect::<Vec<_>>();
    let ratios = || rows.iter().map(|r| r.ratio());
    Ok(QuasiMultiplicativityReport {
        ell,
        min_ratio: ratios().min_by(f64::total_cmp),
        max_ratio: ratios().max_by(f64::total_cmp),
        rows,
    })
}
