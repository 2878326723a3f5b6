//! Error type shared by all modules.

use thiserror::Error;

/// Errors produced by state construction, linear algebra and the measures.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A parameter failed its domain check (range, sign, normalization).
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Matrix dimensions do not match the operation.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// Input expected to be Hermitian deviates from its adjoint.
    #[error("matrix not Hermitian: max |M - M'| = {deviation:.3e} (tolerance {tolerance:.1e})")]
    NotHermitian { deviation: f64, tolerance: f64 },

    /// Input expected to be positive semidefinite has a negative eigenvalue
    /// beyond the clamping tolerance.
    #[error("matrix not positive semidefinite: eigenvalue {eigenvalue:.3e}")]
    NotPositiveSemidefinite { eigenvalue: f64 },

    /// Input is not a valid density matrix (trace, shape or hermiticity).
    #[error("invalid density matrix: {0}")]
    InvalidDensityMatrix(String),

    /// A state vector is not normalized within tolerance.
    #[error("state not normalized: | |psi|^2 - 1 | = {deviation:.3e}")]
    NotNormalized { deviation: f64 },

    /// The Jacobi eigensolver did not reach its convergence threshold.
    #[error(
        "eigensolver did not converge: off-diagonal norm {off_norm:.3e} after {sweeps} sweeps"
    )]
    EigenNoConvergence { off_norm: f64, sweeps: usize },

    /// A qubit-block embedding was requested for a block whose reduced state
    /// occupies more than a two-dimensional subspace.
    #[error("block support dimension {dim} exceeds 2 (weight {weight:.3e} outside support)")]
    BlockSupportTooLarge { dim: usize, weight: f64 },

    /// Requested evolution time lies beyond the discrete reservoir's
    /// recurrence horizon.
    #[error("time {time:.6} beyond recurrence horizon {horizon:.6}")]
    BeyondHorizon { time: f64, horizon: f64 },

    /// A root finder failed to bracket or converge.
    #[error("root finding failed: {0}")]
    RootFinding(String),

    /// A cross-checked identity that must hold for states in this artifact
    /// was violated; this signals a bug, not bad input.
    #[error("internal invariant violated: {0}")]
    InvariantViolation(String),
}

pub type Result<T> = std::result::Result<T, Error>;
