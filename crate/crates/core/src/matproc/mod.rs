//! Non-negative matrix kernel: entry-sum norms, allowability, the Hilbert
//! projective metric and Birkhoff contraction coefficient, spectral radius,
//! and overflow-proof running products.

pub mod codec;
mod cone;
mod matrix;
mod scaled;
mod spectral;
mod support;

pub use cone::{hilbert_metric, ConeVector};
pub use matrix::{Allowability, NonNegMatrix};
pub use scaled::{log_norm_bounds, log_norm_bounds_log, scaled_multiply, LogMatrix, ScaledProduct};
pub use spectral::{log_spectral_radius, spectral_radius, DEFAULT_TOL, SQUARING_BUDGET};
pub use support::SupportPattern;

#[allow(unused_imports)]
pub(crate) use scaled::log_sum_exp;

/// Largest supported matrix dimension.
pub const MAX_DIM: usize = 16;
