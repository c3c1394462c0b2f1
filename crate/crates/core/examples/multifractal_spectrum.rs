//! Dimension spectrum of weighted Birkhoff averages by Legendre transform
//! of the pressure; the Besicovitch–Eggleston case has a closed form.

use nonneg_cocycle::multifractal::{psi, spectrum_curve, WeightedAverageSpec};

fn main() -> nonneg_cocycle::Result<()> {
    let spec = WeightedAverageSpec::besicovitch();
    println!("ψ(0) = {:.12} = log 2", psi(&spec, 0.0, 1024)?);
    let betas: Vec<f64> = (-8..=8).map(|k| k as f64 * 0.5).collect();
    let curve = spectrum_curve(&spec, &betas, 1024, None)?;
    for p in &curve.points {
        let h = -(p.alpha * p.alpha.ln() + (1.0 - p.alpha) * (1.0 - p.alpha).ln()) / 2f64.ln();
        println!("β = {:5.2}  α = {:.5}  dim = {:.8}  H(α)/log 2 = {h:.8}", p.beta, p.alpha, p.dim);
    }
    let mut csv = Vec::new();
    curve.write_csv(&mut csv)?;
    println!("{} bytes of CSV", csv.len());
    Ok(())
}
