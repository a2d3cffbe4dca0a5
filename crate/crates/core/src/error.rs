//! Error type shared by every stage of the pipeline.

use thiserror::Error;

/// Failures surfaced by construction, decomposition, encoding, and sampling.
///
/// Variants carry the measured quantity that violated the contract so a
/// caller can report how far off the input was, not just that it was off.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Input to the Hermitian eigensolver deviates from its own adjoint.
    #[error("matrix is not Hermitian: max deviation {deviation:.3e} exceeds {tolerance:.3e}")]
    NonHermitianInput { deviation: f64, tolerance: f64 },

    /// Jacobi sweeps did not drive the off-diagonal mass below threshold.
    #[error("eigensolver did not converge within {sweeps} sweeps")]
    NoConvergence { sweeps: usize },

    /// Square root requested of a matrix with an eigenvalue below the
    /// accepted roundoff band.
    #[error("matrix is not positive semidefinite: smallest eigenvalue {min_eigenvalue:.3e}")]
    IndefiniteInput { min_eigenvalue: f64 },

    /// Constraint rows handed to unitary completion are not orthonormal.
    #[error("constraint rows are not orthonormal: {detail}")]
    NonOrthonormalConstraint { detail: String },

    /// Shapes or indices do not line up.
    #[error("dimension mismatch: {detail}")]
    DimensionMismatch { detail: String },

    /// A filter had the wrong number of taps for the requested operation.
    #[error("expected a {expected}-tap filter, got {actual} taps")]
    WrongArity { expected: usize, actual: usize },

    /// Tap counts of two filters are incompatible with the combined length.
    #[error("incompatible tap counts: {detail}")]
    ArityMismatch { detail: String },

    /// Requested tone sits at or above the Nyquist rate of the sample grid.
    #[error("tone at {frequency} Hz is not below the Nyquist rate {nyquist} Hz")]
    AliasedTone { frequency: f64, nyquist: f64 },

    /// Every tap is zero; such a filter has no normalizable unitary row.
    #[error("all filter taps are zero")]
    ZeroFilter,

    /// Scaled window amplitudes exceed unit norm; the scale bound M was
    /// smaller than the actual signal magnitude.
    #[error("scaled window norm {norm} exceeds 1; scale bound too small for the signal")]
    ScaleOverflow { norm: f64 },

    /// A matrix that must be a contraction has spectral norm above 1, so
    /// the literal dilation radicand goes indefinite. `literal_residual` is
    /// the unitarity residual of the literal block form built with the
    /// negative spectrum clamped to zero.
    #[error(
        "operator is not a contraction: spectral norm {sigma_max}; \
         clamped literal dilation residual {literal_residual:.3e}"
    )]
    NotAContraction {
        sigma_max: f64,
        literal_residual: f64,
    },

    /// An operator that must certify as unitary did not.
    #[error("unitarity residual {residual:.3e} exceeds tolerance {tolerance:.3e}")]
    CertificateFailure { residual: f64, tolerance: f64 },

    /// State handed to the sampler is too far from unit norm.
    #[error("state norm deviates from 1 by {deviation:.3e}")]
    UnnormalizedState { deviation: f64 },

    /// A value that must be finite was NaN or infinite.
    #[error("non-finite value in {context}")]
    NonFinite { context: &'static str },
}

pub type Result<T> = std::result::Result<T, Error>;
