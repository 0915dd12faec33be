//! Pearson correlation of return series and the full eigendecomposition of
//! the resulting matrix.

mod correlation;
mod jacobi;

use alloc::string::String;
use core::fmt;

pub use correlation::{correlation, correlation_of, CorrelationMatrix};
pub use jacobi::{eigendecompose, jacobi_eigen, EigenDecomposition, MAX_SWEEPS};

#[derive(Debug, Clone, PartialEq)]
pub enum SpectraError {
    /// A series with zero sample variance has no defined correlation.
    DegenerateSeries(String),
    InsufficientObservations { observations: usize },
    /// The off-diagonal norm was still above tolerance after the sweep limit.
    NoConvergence { sweeps: usize, off_norm: f64 },
    /// Matrix values do not form a valid correlation matrix.
    InvalidMatrix(&'static str),
}

impl fmt::Display for SpectraError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpectraError::DegenerateSeries(t) => write!(f, "series {t} has zero variance"),
            SpectraError::InsufficientObservations { observations } => {
                write!(f, "correlation needs at least 2 observations, got {observations}")
            }
            SpectraError::NoConvergence { sweeps, off_norm } => {
                write!(f, "jacobi did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:e})")
            }
            SpectraError::InvalidMatrix(why) => write!(f, "invalid correlation matrix: {why}"),
        }
    }
}

impl core::error::Error for SpectraError {}
