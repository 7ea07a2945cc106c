use thiserror::Error;

use crate::fock::TruncationReport;

/// Errors produced by state construction, channels and protocols.
#[derive(Debug, Clone, Error)]
pub enum CatsimError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("truncation error: tail mass {:.3e} above cutoff {} exceeds tolerance {:.1e}", .0.tail_mass, .0.cutoff, .0.tolerance)]
    Truncation(TruncationReport),

    /// Probability leaking out of the truncated grid during a unitary.
    #[error("truncation error: {leaked:.3e} probability leaked above the two-mode cutoff")]
    Leakage { leaked: f64 },

    #[error("degenerate amplitude: |beta| = {0:.3e} is below 1e-3")]
    DegenerateAmplitude(f64),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("zero state: norm {0:.3e} is below 1e-14")]
    ZeroState(f64),

    #[error("impossible outcome: probability {0:.3e} is below 1e-14")]
    ImpossibleOutcome(f64),

    #[error("eigensolver did not converge after {sweeps} sweeps (off-diagonal mass {off:.3e})")]
    NoConvergence { sweeps: usize, off: f64 },
}

pub type Result<T> = std::result::Result<T, CatsimError>;

pub(crate) fn invalid(msg: impl Into<String>) -> CatsimError {
    CatsimError::InvalidArgument(msg.into())
}
