//! Pressure `ψ(β)` of weighted Birkhoff averages through the β-deformed
//! matrix cocycle, and the dimension spectrum by Legendre transform.

mod spectrum;
mod weighted;

pub use spectrum::{default_step, psi, spectrum_curve, SpectrumCurve, SpectrumPoint};
pub use weighted::{beta_cocycle, WeightedAverageSpec, MAX_EXPONENT};
