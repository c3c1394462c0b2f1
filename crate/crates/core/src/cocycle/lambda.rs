use rayon::prelude::*;

use super::measure::{MeasureKind, MeasureModel};
use super::trace::{lyapunov_trace, partial_product};
use super::CocycleSpec;
use crate::error::{Error, Result};
use crate::symbolic::Symbol;

/// Estimate of `Λ = lim (1/n) E_ν log ‖A^{(n)}‖` at a finite `n`.
#[derive(Clone, Debug, PartialEq)]
pub struct LambdaEstimate {
    /// Mean of `(1/n) log ‖A^{(n)}‖` over replicas with a nonzero product;
    /// `-∞` if every replica hit a zero product.
    pub mean: f64,
    /// Standard error of the mean (0 for exact computations).
    pub std_error: f64,
    /// Number of samples drawn (rotations for the periodic model).
    pub samples: usize,
    /// Samples whose product became the zero matrix.
    pub zero_samples: usize,
    /// Some samples were zero products and others were not; `mean` then
    /// only averages the latter.
    pub mixed_support: bool,
    /// Computed exactly rather than by sampling.
    pub exact: bool,
}

/// Monte-Carlo (or exact, for periodic models) estimate of `Λ`.
///
/// Replica `i` uses generator stream `i` of `seed`; per-replica values are
/// collected in replica order and summed sequentially, so the result does
/// not depend on the number of worker threads.
pub fn lambda_estimate(
    spec: &CocycleSpec,
    measure: &MeasureModel,
    n: usize,
    replicas: usize,
    seed: u64,
) -> Result<LambdaEstimate> {
    if n == 0 {
        return Err(Error::InvalidParameter("horizon n must be positive".into()));
    }
    if measure.alphabet() != spec.alphabet() {
        return Err(Error::InvalidParameter(format!(
            "measure alphabet {} differs from cocycle alphabet {}",
            measure.alphabet().size(),
            spec.alphabet().size()
        )));
    }
    let (values, exact) = match measure.kind() {
        MeasureKind::PeriodicAtomic { cycle } => (rotation_values(spec, cycle, n)?, true),
        _ => {
            if replicas == 0 {
                return Err(Error::InvalidParameter("need at least one replica".into()));
            }
            let base = measure.sampler(seed).expect("samplable measure");
            let values = (0..replicas as u64)
                .into_par_iter()
                .map(|i| {
                    let t = lyapunov_trace(spec, &base.replica(i), &[n])?;
                    Ok(t.values()[0] / n as f64)
                })
                .collect::<Result<Vec<f64>>>()?;
            (values, false)
        }
    };
    Ok(summarise(&values, exact))
}

/// `(1/n) log ‖A^{(n)}(σ^k z)‖` for `z = cycle^∞` and each rotation `k`.
fn rotation_values(spec: &CocycleSpec, cycle: &[Symbol], n: usize) -> Result<Vec<f64>> {
    let p = cycle.len();
    let needed = p + n + spec.depth() - 1;
    let orbit: Vec<Symbol> = cycle.iter().copied().cycle().take(needed).collect();
    (0..p)
        .into_par_iter()
        .map(|k| Ok(partial_product(spec, &orbit, k, k + n)?.log_norm() / n as f64))
        .collect()
}

fn summarise(values: &[f64], exact: bool) -> LambdaEstimate {
    let finite: Vec<f64> = values.iter().copied().filter(|v| v.is_finite()).collect();
    let zero_samples = values.len() - finite.len();
    let k = finite.len();
    let (mean, std_error) = if k == 0 {
        (f64::NEG_INFINITY, 0.0)
    } else {
        let mean = finite.iter().sum::<f64>() / k as f64;
        let se = if exact || k < 2 {
            0.0
        } else {
            let var = finite.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (k - 1) as f64;
            (var / k as f64).sqrt()
        };
        (mean, se)
    };
    LambdaEstimate {
        mean,
        std_error,
        samples: values.len(),
        zero_samples,
        mixed_support: zero_samples > 0 && k > 0,
        exact,
    }
}
