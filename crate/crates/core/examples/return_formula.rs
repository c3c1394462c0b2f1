//! The exponent from return words: choose a marker inside the positivity
//! cylinder, sum block log-norms, and compare with the direct trace.

use nonneg_cocycle::cocycle::{lyapunov_trace_prefix, CocycleSpec};
use nonneg_cocycle::matproc::NonNegMatrix;
use nonneg_cocycle::returnformula::{
    quasi_multiplicativity_check, return_formula_estimates, select_marker,
};
use nonneg_cocycle::symbolic::InfiniteWordSource;

fn main() -> nonneg_cocycle::Result<()> {
    let spec = CocycleSpec::first_coordinate(&[
        NonNegMatrix::from_rows(&[[2.0, 1.0], [1.0, 1.0]])?,
        NonNegMatrix::from_rows(&[[1.0, 3.0], [0.5, 1.0]])?,
    ])?;
    let prefix = InfiniteWordSource::thue_morse().emit_prefix(200_000)?;
    let sel = select_marker(&spec, &prefix, 8, 8)?;
    println!("u = {}, ℓ0 = {}, c1 = {:.4}, v = {}", sel.u, sel.ell0, sel.c1(), sel.v);

    let c2 = spec.log_norm_envelope(1).1;
    for est in return_formula_estimates(&spec, &prefix, &sel, &[8, 16, 64])? {
        let (lo, hi) = est.sandwich(c2);
        println!(
            "M = {:3}: estimate {:.5}, band {:.4}, long mass {:.3}, sandwich [{lo:.4}, {hi:.4}]",
            est.cutoff, est.estimate, est.correction_band, est.long_mass
        );
    }
    let est = &return_formula_estimates(&spec, &prefix, &sel, &[64])?[0];
    let trace = lyapunov_trace_prefix(&spec, &prefix, &[est.tau_i])?;
    println!("trace exponent at τ_i = {}: {:.5}", est.tau_i, trace.exponents()[0]);

    let qm = quasi_multiplicativity_check(&spec, &prefix, &sel, 8)?;
    println!(
        "splitting ratios over {} returns lie in [{:.4}, {:.4}], above c1 = {:.4}",
        qm.rows.len(),
        qm.min_ratio.unwrap(),
        qm.max_ratio.unwrap(),
        sel.c1()
    );
    Ok(())
}
