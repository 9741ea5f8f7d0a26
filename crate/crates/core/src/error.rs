//! Crate-wide error type. Every fallible kernel reports through this enum so
//! the CLI and the C ABI can map failures to stable codes.

use thiserror::Error;

/// Unified error for all laxlab operations.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Two particles moved inside the collision guard radius.
    #[error("collision guard tripped at t = {t}: particles {i} and {j} at separation {separation:.3e}")]
    Collision {
        t: f64,
        i: usize,
        j: usize,
        separation: f64,
    },

    /// An interaction denominator fell below the pole guard.
    #[error("pole guard tripped in {context}: |denominator| = {magnitude:.3e}")]
    Pole {
        context: &'static str,
        magnitude: f64,
    },

    /// The requested operation has no meaning for this family or case.
    #[error("family {family} does not support {operation}")]
    UnsupportedFamily {
        family: &'static str,
        operation: &'static str,
    },

    /// QR iteration exceeded its sweep budget.
    #[error("eigenvalue iteration did not converge for dimension {n} within {sweeps} sweeps")]
    NonConvergence { n: usize, sweeps: usize },

    /// Matrix dimension outside the supported range.
    #[error("dimension {0} outside the supported range 1..=16")]
    Dimension(usize),

    /// A linear solve met a pivot too small to trust.
    #[error("singular matrix: pivot magnitude {0:.3e}")]
    Singular(f64),

    /// A kernel produced NaN or infinity.
    #[error("non-finite value produced in {0}")]
    NonFinite(&'static str),

    /// A self-check that must close to roundoff did not.
    #[error("round-trip consistency failed in {context}: deviation {deviation:.3e}")]
    RoundTrip {
        context: &'static str,
        deviation: f64,
    },

    /// The adaptive integrator could not shrink the step any further.
    #[error("step size underflow at t = {t} (h = {h:.3e})")]
    StepUnderflow { t: f64, h: f64 },

    /// Eigenvalue continuation could not be disambiguated at the refinement cap.
    #[error("spectral branch tracking ambiguous near path parameter {at}")]
    BranchAmbiguity { at: f64 },

    /// Central-difference stencil fell off the sampled series.
    #[error("finite-difference stencil out of range: index {index} of series length {len}")]
    Stencil { index: usize, len: usize },

    /// Invalid configuration or command-line input.
    #[error("configuration error: {0}")]
    Config(String),

    /// Filesystem failure while reading or writing artifacts.
    #[error("io error on {path}: {message}")]
    Io { path: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code for the CLI; the mapping is part of the interface.
    pub fn exit_code(&self) -> i32 {
        match self {
            // Dimension errors only arise from invalid construction input,
            // so they count as configuration problems.
            Error::Config(_) | Error::Io { .. } | Error::Dimension(_) => 2,
            Error::Collision { .. } => 3,
            Error::UnsupportedFamily { .. } => 5,
            _ => 4,
        }
    }
}
