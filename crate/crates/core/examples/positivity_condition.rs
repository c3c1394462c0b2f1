//! Searching for a strictly positive product A^{(ℓ)} on observed windows,
//! and exhaustively.

use nonneg_cocycle::cocycle::{check_positivity_condition, check_positivity_exhaustive, CocycleSpec};
use nonneg_cocycle::matproc::NonNegMatrix;
use nonneg_cocycle::symbolic::InfiniteWordSource;

fn main() -> nonneg_cocycle::Result<()> {
    let upper = NonNegMatrix::from_rows(&[[1.0, 1.0], [0.0, 1.0]])?;
    let lower = NonNegMatrix::from_rows(&[[1.0, 0.0], [1.0, 1.0]])?;
    let spec = CocycleSpec::first_coordinate(&[upper, lower])?;
    let sample = InfiniteWordSource::thue_morse().emit_prefix(1000)?;
    match check_positivity_condition(&spec, &sample, 8)? {
        Some(w) => println!("triangular pair: u = {}, ℓ0 = {}, b = {}", w.u, w.ell0, w.b()),
        None => println!("triangular pair: no witness"),
    }
    println!("exhaustive: {:?}", check_positivity_exhaustive(&spec, 4)?.map(|w| w.u.to_string()));

    // diagonal factors never mix the coordinates
    let diag = CocycleSpec::first_coordinate(&[
        NonNegMatrix::diagonal(&[10.0, 0.1])?,
        NonNegMatrix::diagonal(&[0.1, 10.0])?,
    ])?;
    let sample = InfiniteWordSource::bernoulli(vec![0.5, 0.5], 3)?.emit_prefix(10_000)?;
    println!("diagonal pair: {:?}", check_positivity_condition(&diag, &sample, 64)?);
    Ok(())
}
