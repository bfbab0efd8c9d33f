//! Exact prime censuses in unusual domains.
//!
//! The crate counts
//!
//! - rational primes (the shared [`PrimeTable`] substrate),
//! - irreducibles of the congruence monoids `A_d = {n : n ≡ 1 (mod d)}`,
//! - Gaussian primes in the closed first quadrant inside a norm circle,
//! - irreducibles of the imaginary quadratic rings `Z[√−d]`,
//!
//! and compares each census against a closed-form estimate (ratio, MAPE,
//! crossover point, two-parameter model fits). The [`report`] module turns
//! the resulting [`CountSeries`] into CSV tables and SVG line charts, and
//! [`cli`] wires everything into the `primes-lab` binary.

pub mod analysis;
pub mod cli;
pub mod error;
pub mod gaussian;
pub mod monoid;
pub mod quadratic;
pub mod report;
pub mod sieve;

mod bits;

pub use analysis::{
    build_series, find_crossover, fit_model, mape, ratio_r, Census, CountSeries, Domain,
    Estimator, FitResult, SeriesPoint,
};
pub use error::{LabError, Result};
pub use gaussian::{AxisConvention, GaussPoint, GaussianCensus};
pub use monoid::{MonoidCensus, MonoidParams};
pub use quadratic::{QuadCensus, QuadInt, QuadRing, RegionKind, RegionSpec};
pub use sieve::{sieve_primes, PrimeTable};

/// Largest integer that converts to `f64` without rounding. Every count or
/// bound that meets a floating-point estimate is checked against it.
pub const MAX_EXACT_F64: u64 = 1 << 53;
