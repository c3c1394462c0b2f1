//! Running exponent along one orbit, the ensemble estimate of Λ and a
//! Fekete-style upper envelope.

use nonneg_cocycle::cocycle::{
    fekete_extrapolate, geometric_checkpoints, lambda_estimate, lyapunov_trace, CBound,
    CocycleSpec, MeasureModel,
};
use nonneg_cocycle::matproc::NonNegMatrix;
use nonneg_cocycle::symbolic::InfiniteWordSource;

fn main() -> nonneg_cocycle::Result<()> {
    let spec = CocycleSpec::first_coordinate(&[
        NonNegMatrix::from_rows(&[[3.0, 1.0], [1.0, 1.0]])?,
        NonNegMatrix::from_rows(&[[1.0, 1.0], [1.0, 3.0]])?,
    ])?;
    let orbit = InfiniteWordSource::bernoulli(vec![0.5, 0.5], 42)?;
    let grid: Vec<usize> = (0..12).map(|k| 64 << k).collect();
    let trace = lyapunov_trace(&spec, &orbit, &grid)?;
    let mut stdout = std::io::stdout();
    trace.write_csv(&mut stdout)?;

    let lambda = lambda_estimate(&spec, &MeasureModel::bernoulli(vec![0.5, 0.5])?, 10_000, 64, 7)?;
    println!("Λ ≈ {:.5} ± {:.1e} ({} replicas)", lambda.mean, lambda.std_error, lambda.samples);

    // Along the fixed point 0^∞ the sequence a_n = log ‖A_0^n‖ is
    // subadditive up to |log c(A_0)|, so Fekete's envelope applies. (Along a
    // random orbit a_{2n} ≤ 2 a_n + c need not hold; only the shifted
    // version a_{2n} ≤ a_n + a_n∘σ^n + c does.)
    let fixed = InfiniteWordSource::periodic(2, "0")?;
    let powers = lyapunov_trace(&spec, &fixed, &grid)?;
    let values: Vec<(usize, f64)> = grid.iter().copied().zip(powers.values().iter().copied()).collect();
    let c = spec.min_elem_constant().unwrap().ln().abs();
    let report = fekete_extrapolate(&values, &CBound::Constant { value: c })?;
    println!(
        "A_0^n: Fekete estimate {:.8}, envelope min {:.8}, {} violations",
        report.estimate,
        report.running_min.last().unwrap(),
        report.violations.len()
    );

    let zero = CocycleSpec::first_coordinate(&[
        NonNegMatrix::ones(2),
        NonNegMatrix::from_rows(&[[0.0, 1.0], [0.0, 0.0]])?,
    ])?;
    let t = lyapunov_trace(&zero, &InfiniteWordSource::bernoulli(vec![0.5, 0.5], 1)?, &geometric_checkpoints(1, 64))?;
    println!("nilpotent factors: product vanishes at n = {:?}", t.zero_index());
    Ok(())
}
