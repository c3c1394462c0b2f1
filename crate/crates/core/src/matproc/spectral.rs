use super::{LogMatrix, NonNegMatrix, ScaledProduct};
use crate::error::{Error, Result};

/// Maximum number of squarings before giving up.
pub const SQUARING_BUDGET: usize = 200;

/// Default tolerance on successive log-radius estimates.
pub const DEFAULT_TOL: f64 = 1e-13;

/// Spectral radius by Gelfand's formula on repeated squarings.
///
/// `tol` bounds the difference between successive estimates of `log ρ`
/// (relative once `|log ρ| > 1`), which is also the relative accuracy on `ρ`.
pub fn spectral_radius(matrix: &NonNegMatrix, tol: f64) -> Result<f64> {
    if matrix.dim() == 1 {
        return Ok(matrix.get(0, 0));
    }
    Ok(log_spectral_radius(&ScaledProduct::from_factor(&LogMatrix::from(matrix)), tol)?.exp())
}

/// `log ρ` of the matrix represented by `product`; `-∞` when it is nilpotent.
///
/// Works on the log-domain product directly, so products whose entries
/// leave the `f64` range are handled. Let `g_k = log ‖C^{2^k}‖ / 2^k`. For
/// the products met here `g_k = log ρ + a/2^k + o(2^{-k})`, so the
/// extrapolated value `2 g_k − g_{k−1}` converges much faster than `g_k`
/// and is what gets returned.
pub fn log_spectral_radius(product: &ScaledProduct, tol: f64) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tolerance {tol} must be positive")));
    }
    if product.is_zero() {
        return Ok(f64::NEG_INFINITY);
    }
    let base = if product.is_empty() {
        0.0
    } else {
        product.log_norm()
    };
    if product.dim() == 1 {
        return Ok(base);
    }
    // unit-norm copy of C
    let mut unit = ScaledProduct::from_factor(&LogMatrix::from_log_entries(
        product.dim(),
        product.unit_log_entries().to_vec(),
    )?);
    let mut gelfand = base;
    let mut weight = 1.0;
    let mut prev_extrapolated = f64::NAN;
    for k in 1..=SQUARING_BUDGET {
        let squared = unit.concat(&unit)?;
        if squared.is_zero() {
            return Ok(f64::NEG_INFINITY);
        }
        weight *= 0.5;
        let step = squared.log_norm() * weight;
        let previous = gelfand;
        gelfand += step;
        let extrapolated = 2.0 * gelfand - previous;
        if k >= 2 && (extrapolated - prev_extrapolated).abs() <= tol * extrapolated.abs().max(1.0) {
            return Ok(extrapolated);
        }
        prev_extrapolated = extrapolated;
        unit = ScaledProduct::from_factor(&LogMatrix::from_log_entries(
            product.dim(),
            squared.unit_log_entries().to_vec(),
        )?);
    }
    Err(Error::BudgetExceeded {
        budget: SQUARING_BUDGET,
        previous: prev_extrapolated.exp(),
        last: gelfand.exp(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[f64]]) -> NonNegMatrix {
        NonNegMatrix::from_rows(rows).unwrap()
    }

    #[test]
    fn golden_ratio() {
        let fib = m(&[&[1.0, 1.0], &[1.0, 0.0]]);
        let rho = spectral_radius(&fib, DEFAULT_TOL).unwrap();
        assert!((rho - (1.0 + 5f64.sqrt()) / 2.0).abs() < 1e-12);
    }

    #[test]
    fn diagonal_and_scalar() {
        let d = NonNegMatrix::diagonal(&[10.0, 0.1]).unwrap();
        assert!((spectral_radius(&d, DEFAULT_TOL).unwrap() - 10.0).abs() < 1e-11);
        let s = m(&[&[3.5]]);
        assert_eq!(spectral_radius(&s, DEFAULT_TOL).unwrap(), 3.5);
    }

    #[test]
    fn imprimitive_and_jordan() {
        // period-2 with rho = sqrt(ab)
        let p = m(&[&[0.0, 8.0], &[2.0, 0.0]]);
        assert!((spectral_radius(&p, DEFAULT_TOL).unwrap() - 4.0).abs() < 1e-12);
        let swap = m(&[&[0.0, 1.0], &[1.0, 0.0]]);
        assert!((spectral_radius(&swap, DEFAULT_TOL).unwrap() - 1.0).abs() < 1e-12);
        let jordan = m(&[&[2.0, 1.0], &[0.0, 2.0]]);
        assert!((spectral_radius(&jordan, 1e-12).unwrap() - 2.0).abs() < 1e-9);
    }

    #[test]
    fn nilpotent_has_zero_radius() {
        let n = m(&[&[0.0, 1.0], &[0.0, 0.0]]);
        assert_eq!(spectral_radius(&n, DEFAULT_TOL).unwrap(), 0.0);
        assert_eq!(spectral_radius(&NonNegMatrix::zeros(3), DEFAULT_TOL).unwrap(), 0.0);
    }

    #[test]
    fn rejects_bad_tolerance() {
        assert!(spectral_radius(&NonNegMatrix::ones(2), 0.0).is_err());
    }

    #[test]
    fn huge_log_scale_product() {
        let d = NonNegMatrix::diagonal(&[1e10, 1e-10]).unwrap();
        let mut acc = ScaledProduct::identity(2);
        for _ in 0..100 {
            acc.push_matrix(&d).unwrap();
        }
        let lr = log_spectral_radius(&acc, DEFAULT_TOL).unwrap();
        assert!((lr - 1000.0 * 10f64.ln()).abs() < 1e-9);
    }
}
