//! Auditing correlations between trending time series.
//!
//! The crate bundles the pieces needed to decide whether a correlation between
//! two series in levels is likely spurious: series alignment and differencing,
//! correlation and regression kernels, augmented Dickey-Fuller tests, a
//! random-walk Monte Carlo null, and a type-token-ratio pipeline for word
//! count corpora.

pub mod adf;
pub mod audit;
pub mod csv_io;
pub mod error;
pub mod lexdiv;
mod linalg;
pub mod montecarlo;
pub mod report;
pub mod rng;
pub mod series;
pub mod special;
pub mod stats;

pub use adf::{adf_test, AdfResult, CriticalValues, Deterministic};
pub use audit::{audit, AuditConfig, AuditReport, Verdict, VerdictCategory};
pub use error::{Error, Result};
pub use montecarlo::{
    gen_random_walk, histogram, run_monte_carlo, Histogram, MonteCarloDigest, MonteCarloSummary,
    WalkParams,
};
pub use report::{to_canonical_json, write_report, Format, SimulationReport};
pub use series::{align, detrend_linear, difference, moving_average, AlignedPair, TimeSeries};
pub use stats::{ols_simple, pearson, CorrelationMode, CorrelationResult, OlsFit};
