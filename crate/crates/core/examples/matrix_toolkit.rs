//! Non-negative matrices: log-domain products, the elementary constant,
//! Birkhoff contraction and spectral radius.

use nonneg_cocycle::matproc::{
    hilbert_metric, spectral_radius, ConeVector, NonNegMatrix, ScaledProduct, DEFAULT_TOL,
};

fn main() -> nonneg_cocycle::Result<()> {
    let a = NonNegMatrix::from_rows(&[[2.0, 1.0], [1.0, 1.0]])?;
    let b = NonNegMatrix::from_rows(&[[1e-200, 1.0], [1.0, 0.0]])?;

    // 10^4 factors: far outside the f64 range, fine in the log domain
    let mut p = ScaledProduct::identity(2);
    for k in 0..10_000 {
        p.push_matrix(if k % 3 == 0 { &b } else { &a })?;
    }
    println!("log ‖product‖ = {:.6}, unit matrix {:?}", p.log_norm(), p.unit_matrix()?);

    println!("c(A) = {}", a.elem_constant()?);
    println!("φ(A) = {}, τ(A) = {:.12}", a.phi()?, a.birkhoff_tau()?);
    let x = ConeVector::new(vec![1.0, 3.0])?;
    let y = ConeVector::new(vec![2.0, 1.0])?;
    let before = hilbert_metric(&x, &y)?;
    let after = hilbert_metric(&x.mapped_by(&a)?, &y.mapped_by(&a)?)?;
    println!("d_H shrinks from {before:.4} to {after:.4} (ratio {:.4} ≤ τ)", after / before);

    let ab = a.mul(&b)?;
    let ba = b.mul(&a)?;
    println!(
        "ρ(AB) = {:.15}, ρ(BA) = {:.15}",
        spectral_radius(&ab, DEFAULT_TOL)?,
        spectral_radius(&ba, DEFAULT_TOL)?
    );
    Ok(())
}
