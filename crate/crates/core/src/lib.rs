//! Exact and floating computations around Piatetski-Shapiro sets.
//!
//! The crate is organised around one numerical discipline: every decision
//! that must be exact (floor of `n^(u/v)`, set membership, admissibility
//! inequalities) is made with integer or rational arithmetic, while every
//! quantity that is inherently analytic (exponential sums, main terms,
//! singular series) is evaluated in `f64` with deterministic reduction
//! orders so repeated runs agree bit for bit.
//!
//! Module map:
//! * [`exact`] — rational exponents, certified fixed-point powers, `psi`.
//! * [`sieve`] — segmented prime sieve and linear multiplicative tables.
//! * [`psets`] — membership profiles, prime counting, main terms,
//!   admissibility reports.
//! * [`singular`] — truncated singular-series products with tail bounds.
//! * [`ternary`] — ordered-triple Goldbach sums in four weightings.
//! * [`expsum`] — exponential sums, bound envelopes, combinatorial
//!   decompositions and sawtooth-difference scans.

pub mod error;
pub mod exact;
pub mod expsum;
pub mod psets;
pub mod reduce;
pub mod sieve;
pub mod singular;
pub mod ternary;

pub use error::Error;
pub use exact::{CertifiedFrac, RationalExponent};
pub use expsum::{BoundReport, ExpSumParams};
pub use psets::{AdmissibilityReport, PsProfile};
pub use sieve::{ArithTables, PrimeTable};
pub use singular::SingularValue;
pub use ternary::{TernaryMode, TernaryReport};

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Library version, embedded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
