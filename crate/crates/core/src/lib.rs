//! Pure algorithmic core for screening a universe of assets for near-duplicate
//! return behaviour.
//!
//! The lowest-variance principal components of a return correlation matrix
//! describe linear combinations of assets that are almost constant. When only
//! a handful of assets carry large loadings on such a component, those assets
//! move together: opposite-signed loadings mark a positive correlation and
//! equal-signed loadings a negative one.
//!
//! The pipeline is
//!
//! ```text
//! PricePanel --filter_complete--> PricePanel --compute_returns--> ReturnPanel
//!     --correlation--> CorrelationMatrix --eigendecompose--> EigenDecomposition
//!     --detect--> Vec<RelationshipGroup>
//! ```
//!
//! The crate is `no_std` and only needs `alloc`. File formats, reports and the
//! command line live in the `tailpc` crate.

#![no_std]
#![deny(unsafe_code)]

extern crate alloc;

pub mod detector;
pub mod panel;
pub mod returns;
pub mod spectra;
pub mod synth;

pub use detector::{
    detect, rolling_detect, significant_loadings, DetectError, DetectorConfig, RelationshipGroup,
    WindowDetection,
};
pub use panel::{DividendEvent, Dropped, FilterOutcome, PanelError, PricePanel};
pub use returns::{adjust_prices, compute_returns, dividend_factors, ReturnPanel, ReturnsError};
pub use spectra::{correlation, eigendecompose, CorrelationMatrix, EigenDecomposition, SpectraError};
pub use synth::{generate, SynthError, SynthMarket, SynthSpec};

pub use chrono::NaiveDate;
