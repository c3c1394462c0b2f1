pub mod cli;
pub mod cocycle;
pub mod error;
pub mod matproc;
pub mod multifractal;
pub mod returnformula;
pub mod scenario;
pub mod symbolic;

pub use error::{Error, Result};
