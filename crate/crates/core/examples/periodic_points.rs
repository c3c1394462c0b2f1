//! Exact exponents of periodic orbits: log ρ(A_{w_0} ⋯ A_{w_{p−1}}) / p.

use nonneg_cocycle::cocycle::{lyapunov_trace, CocycleSpec};
use nonneg_cocycle::matproc::NonNegMatrix;
use nonneg_cocycle::returnformula::{periodic_exponent, periodic_exponent_rotations};
use nonneg_cocycle::symbolic::{FiniteWord, InfiniteWordSource};

fn main() -> nonneg_cocycle::Result<()> {
    let fib = CocycleSpec::first_coordinate(&[NonNegMatrix::from_rows(&[[1.0, 1.0], [1.0, 0.0]])?])?;
    let golden = periodic_exponent(&fib, &[0])?;
    println!("Fibonacci: {golden:.15} (log φ = {:.15})", ((1.0 + 5f64.sqrt()) / 2.0).ln());
    for n in [10, 100, 1000, 10_000] {
        let t = lyapunov_trace(&fib, &InfiniteWordSource::periodic(1, "0")?, &[n])?;
        println!("  n = {n:5}: (1/n) log ‖F^n‖ − log φ = {:.3e}", t.exponents()[0] - golden);
    }

    let spec = CocycleSpec::first_coordinate(&[
        NonNegMatrix::from_rows(&[[2.0, 1.0], [1.0, 1.0]])?,
        NonNegMatrix::from_rows(&[[1.0, 3.0], [0.5, 1.0]])?,
    ])?;
    let cycle: FiniteWord = "0010111".parse()?;
    println!("cycle {cycle}: {:.12}", periodic_exponent(&spec, &cycle)?);
    println!("rotations: {:?}", periodic_exponent_rotations(&spec, &cycle)?);
    Ok(())
}
