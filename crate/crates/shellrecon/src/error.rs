//! Crate-wide error type.
//!
//! Every fallible operation in this crate reports through [`Error`]. The
//! variants are grouped by failure class rather than by module, so callers
//! (in particular the command-line frontend) can map them onto a stable exit
//! code taxonomy: domain and usage problems, numeric degeneracies, truncation
//! failures, inconsistent measurements, and root searches that come up empty.

use thiserror::Error;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Unified error type for all shellrecon operations.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the operation
    /// (non-positive radius, interface outside the unit ball, `|mu| > 1`, …).
    #[error("domain error: {0}")]
    Domain(String),

    /// An unscaled value exceeds (or underflows) the representable `f64`
    /// range. The message says which scaled or ratio variant stays finite.
    #[error("unrepresentable value: {0}")]
    Overflow(String),

    /// A denominator that the theory guarantees to be nonzero collapsed
    /// numerically (Neumann resonance, vanishing normalisation, …).
    #[error("numeric degeneracy: {0}")]
    Degenerate(String),

    /// A spectral tail failed its decay certificate before the mode cap.
    #[error("truncation not certified: {0}")]
    Truncation(String),

    /// A single measurement mode cannot be inverted (denominator of the
    /// Möbius inversion vanishes or the data are not usable).
    #[error("ill-posed mode: {0}")]
    IllPosedMode(String),

    /// Different modes of one measurement disagree about the coefficient;
    /// the data cannot come from any piecewise-constant configuration.
    #[error("inconsistent measurement: {0}")]
    InconsistentMeasurement(String),

    /// A root search (indistinguishable-pair construction) found no sign
    /// change over the requested range.
    #[error("no root: {0}")]
    NoRoot(String),

    /// The finite-difference system could not be factorised.
    #[error("singular linear system: {0}")]
    SingularSystem(String),

    /// Malformed JSON input for boundary data or measurements.
    #[error("invalid JSON: {0}")]
    InvalidJson(String),
}

impl From<serde_json::Error> for Error {
    fn from(err: serde_json::Error) -> Self {
        Error::InvalidJson(err.to_string())
    }
}
