use serde::Serialize;

use crate::cocycle::{check_positivity_condition, window_product, CocycleSpec};
use crate::error::{Error, Result};
use crate::symbolic::{occurrences, FiniteWord, Symbol};

/// The positivity cylinder `[u]` and the marker `v = z_0^{k_0}` cut from
/// an observed point `z ∈ [u]`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MarkerSelection {
    pub u: FiniteWord,
    pub ell0: usize,
    /// `log b`, `b` the smallest entry of `A^{(ℓ0)}` on `[u]`.
    pub log_b: f64,
    /// `log c_1`, `c_1 = c(A^{(ℓ0)})` on `[u]`.
    pub log_c1: f64,
    /// Position in the prefix where `z` starts.
    pub z_position: usize,
    /// The observed part of `z`, at least `k0` symbols.
    pub z_prefix: FiniteWord,
    pub v: FiniteWord,
    pub k0: usize,
    /// Whether `σ^{|u|} z ∉ [u]`; `None` when the prefix ends too early to tell.
    pub leaves_u: Option<bool>,
}

impl MarkerSelection {
    pub fn b(&self) -> f64 {
        self.log_b.exp()
    }

    pub fn c1(&self) -> f64 {
        self.log_c1.exp()
    }
}

/// Marker selection from the first occurrence of the positivity witness.
pub fn select_marker(
    spec: &CocycleSpec,
    prefix: &[Symbol],
    k0: usize,
    max_ell: usize,
) -> Result<MarkerSelection> {
    select_marker_at(spec, prefix, k0, max_ell, 0)
}

/// As [`select_marker`], taking `z` at the `occurrence`-th occurrence of `u`
/// (counting from 0).
pub fn select_marker_at(
    spec: &CocycleSpec,
    prefix: &[Symbol],
    k0: usize,
    max_ell: usize,
    occurrence: usize,
) -> Result<MarkerSelection> {
    select(spec, prefix, k0, max_ell, |hits| {
        hits.get(occurrence).copied().ok_or_else(|| {
            Error::InvalidParameter(format!(
                "positivity word occurs {} times, occurrence {occurrence} requested",
                hits.len()
            ))
        })
    })
}

/// As [`select_marker`], taking `z` at the first occurrence of `u` at or
/// after position `from`.
pub fn select_marker_from(
    spec: &CocycleSpec,
    prefix: &[Symbol],
    k0: usize,
    max_ell: usize,
    from: usize,
) -> Result<MarkerSelection> {
    select(spec, prefix, k0, max_ell, |hits| {
        hits.iter().copied().find(|&p| p >= from).ok_or_else(|| {
            Error::InvalidParameter(format!("positivity word does not occur after position {from}"))
        })
    })
}

fn select(
    spec: &CocycleSpec,
    prefix: &[Symbol],
    k0: usize,
    max_ell: usize,
    pick: impl FnOnce(&[usize]) -> Result<usize>,
) -> Result<MarkerSelection> {
    if k0 == 0 {
        return Err(Error::InvalidParameter("marker length k0 must be at least 1".into()));
    }
    let witness = check_positivity_condition(spec, prefix, max_ell)?
        .ok_or(Error::ConditionUnsatisfied { max_ell })?;
    let n0 = witness.u.len();
    if k0 < n0 {
        return Err(Error::InvalidParameter(format!(
            "marker length {k0} is shorter than the positivity word ({n0})"
        )));
    }
    let hits = occurrences(prefix, &witness.u, 0);
    let z_position = pick(&hits)?;
    let available = prefix.len() - z_position;
    if available < k0 {
        return Err(Error::InsufficientContext {
            required: z_position + k0,
            available: prefix.len(),
        });
    }
    let z_len = available.min(k0.max(2 * n0));
    let z = &prefix[z_position..z_position + z_len];
    let leaves_u = (z.len() >= 2 * n0).then(|| z[n0..2 * n0] != *witness.u.symbols());

    let product = window_product(spec, &witness.u)?;
    let unit = product.unit_log_entries();
    let lo = unit.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = unit.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(MarkerSelection {
        u: witness.u,
        ell0: witness.ell0,
        log_b: witness.log_b,
        log_c1: lo - hi - (spec.dim() as f64).ln(),
        z_position,
        z_prefix: FiniteWord::from(z),
        v: FiniteWord::from(&z[..k0]),
        k0,
        leaves_u,
    })
}
