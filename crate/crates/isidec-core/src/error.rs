//! Error type shared by the core modules.

use core::fmt;

/// Errors surfaced by the core numerical operations.
///
/// Contract violations that indicate a programming error (mismatched lengths
/// where an operation documents none) panic instead; this enum covers the
/// failure modes a caller can meaningfully react to.
#[derive(Debug, Clone, PartialEq)]
pub enum CoreError {
    /// An input failed a documented precondition.
    InvalidInput { what: &'static str },
    /// Rejection sampling hit the retry cap; the shell width is too small for
    /// the configured block length.
    SamplingExhausted { attempts: u32 },
    /// The Gram matrix of a least-squares fit is numerically singular.
    SingularSystem { condition: f64 },
    /// A fitted residual variance fell below the floor; the backward channel
    /// degenerates and its log-likelihood is unbounded.
    DegenerateFit { sigma0_sq: f64 },
    /// An iterative routine failed to converge.
    NonConvergence { what: &'static str },
    /// A spectrum fed to the inverse transform was not conjugate-symmetric:
    /// the reconstruction kept a relative imaginary residue above tolerance.
    AsymmetricSpectrum { residue: f64 },
    /// Interference basis dimensions do not match the block length.
    DimensionMismatch { expected: usize, got: usize },
    /// No importance sample landed in the target set; ε is too small for the
    /// requested sample count.
    ZeroHits,
}

impl fmt::Display for CoreError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoreError::InvalidInput { what } => write!(f, "invalid input: {what}"),
            CoreError::SamplingExhausted { attempts } => {
                write!(
                    f,
                    "shell rejection sampling exhausted after {attempts} attempts"
                )
            }
            CoreError::SingularSystem { condition } => {
                write!(
                    f,
                    "least-squares system is singular (condition estimate {condition:.3e})"
                )
            }
            CoreError::DegenerateFit { sigma0_sq } => {
                write!(
                    f,
                    "degenerate backward fit: residual variance {sigma0_sq:.3e} below floor"
                )
            }
            CoreError::NonConvergence { what } => write!(f, "{what} did not converge"),
            CoreError::AsymmetricSpectrum { residue } => {
                write!(
                    f,
                    "spectrum is not conjugate-symmetric (imaginary residue {residue:.3e})"
                )
            }
            CoreError::DimensionMismatch { expected, got } => {
                write!(f, "dimension mismatch: expected {expected}, got {got}")
            }
            CoreError::ZeroHits => write!(f, "no sample hit the target set"),
        }
    }
}
