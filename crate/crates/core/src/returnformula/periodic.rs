use rayon::prelude::*;

use crate::cocycle::{partial_product, CocycleSpec};
use crate::error::{Error, Result};
use crate::matproc::{log_spectral_radius, ScaledProduct, DEFAULT_TOL};
use crate::symbolic::Symbol;

/// Largest disagreement tolerated between rotations, relative to `max(1, |log ρ|)`.
const ROTATION_TOL: f64 = 1e-9;

/// `log ρ(A^{(p)}(z)) / p` for every rotation `z = σ^k(cycle^∞)`, `k < p`.
///
/// Rotated period products are assembled from prefix and suffix products
/// of a single period, so all rotations together cost `O(p)` products
/// plus one spectral radius each.
pub fn periodic_exponent_rotations(spec: &CocycleSpec, cycle: &[Symbol]) -> Result<Vec<f64>> {
    let p = cycle.len();
    if p == 0 {
        return Err(Error::InvalidParameter("cycle is empty".into()));
    }
    spec.alphabet().check_word(cycle)?;
    let r = spec.depth();
    let orbit: Vec<Symbol> = cycle.iter().copied().cycle().take(p + r - 1).collect();
    let factors = (0..p)
        .map(|k| spec.factor(&orbit[k..k + r]))
        .collect::<Result<Vec<_>>>()?;
    // heads[k] = F_0 ⋯ F_{k−1}, tails[k] = F_k ⋯ F_{p−1}
    let mut heads = Vec::with_capacity(p);
    let mut acc = ScaledProduct::identity(spec.dim());
    for f in &factors {
        heads.push(acc.clone());
        acc.push(f)?;
    }
    let mut tails = vec![ScaledProduct::identity(spec.dim()); p];
    let mut acc = ScaledProduct::identity(spec.dim());
    for k in (0..p).rev() {
        acc = ScaledProduct::from_factor(factors[k]).concat(&acc)?;
        tails[k] = acc.clone();
    }
    (0..p)
        .into_par_iter()
        .map(|k| {
            let c = tails[k].concat(&heads[k])?;
            Ok(log_spectral_radius(&c, DEFAULT_TOL)? / p as f64)
        })
        .collect()
}

/// Exponent of the periodic point `cycle^∞`: `log ρ(A^{(p)}) / p`, or `-∞`
/// when the period product is nilpotent.
///
/// Every rotation of the cycle must give the same value (`ρ(AB) = ρ(BA)`);
/// a disagreement beyond `1e-9` is reported as an error.
pub fn periodic_exponent(spec: &CocycleSpec, cycle: &[Symbol]) -> Result<f64> {
    let p = cycle.len();
    let rotations = periodic_exponent_rotations(spec, cycle)?;
    let orbit: Vec<Symbol> = cycle.iter().copied().cycle().take(p + spec.depth() - 1).collect();
    let direct = partial_product(spec, &orbit, 0, p)?;
    let value = log_spectral_radius(&direct, DEFAULT_TOL)? / p as f64;
    for (k, &x) in rotations.iter().enumerate() {
        let agree = if value == f64::NEG_INFINITY {
            x == f64::NEG_INFINITY
        } else {
            (x - value).abs() <= ROTATION_TOL * value.abs().max(1.0)
        };
        if !agree {
            return Err(Error::Domain(format!(
                "rotation {k} of the cycle gives exponent {x}, rotation 0 gives {value}"
            )));
        }
    }
    Ok(value)
}
