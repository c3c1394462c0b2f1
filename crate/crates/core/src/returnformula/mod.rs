//! The return-word route to `L(ω)`: marker selection inside the positivity
//! cylinder, the orbit-average estimate over return words, the
//! quasi-multiplicativity check along return times, and exact exponents of
//! periodic points.

mod estimate;
mod marker;
mod periodic;

pub use estimate::{
    quasi_multiplicativity_check, return_formula_estimate, return_formula_estimates,
    QuasiMultiplicativityReport,
    QuasiMultiplicativityRow, ReturnFormulaEstimate, ReturnFormulaReport, WordStats,
};
pub use marker::{select_marker, select_marker_at, select_marker_from, MarkerSelection};
pub use periodic::{periodic_exponent, periodic_exponent_rotations};
