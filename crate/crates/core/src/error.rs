use thiserror::Error;

use crate::fock::SpaceKind;

/// Errors raised by operator construction, exponentiation and quadrature.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid cutoff {0}: at least 4 retained basis states are required")]
    InvalidCutoff(usize),

    #[error("a spin-K space requires a spin weight 2K")]
    MissingSpin,

    #[error("spin weight 2K = {0} must be positive")]
    NonPositiveSpin(f64),

    #[error("spin weight 2K = {two_k} outside the supported range ({requirement})")]
    SpinOutOfRange {
        two_k: f64,
        requirement: &'static str,
    },

    #[error("operation requires a {expected} space, got a {found} space")]
    WrongSpaceKind {
        expected: SpaceKind,
        found: SpaceKind,
    },

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("generator is not anti-Hermitian: |G + G^dagger| = {defect:.3e} (|G| = {norm:.3e})")]
    NotAntiHermitian { defect: f64, norm: f64 },

    #[error(
        "matrix exponential overflowed; the cutoff/parameter combination is numerically infeasible"
    )]
    Overflow,

    #[error("safe sector rank {rank} exceeds the limit {limit}")]
    SectorTooLarge { rank: usize, limit: usize },

    #[error("{name} = {value} is out of range ({requirement})")]
    OutOfRange {
        name: &'static str,
        value: f64,
        requirement: &'static str,
    },

    #[error("amplitude {amplitude} is too large for cutoff {cutoff} (truncation tail {tail:.3e})")]
    AmplitudeTooLarge {
        amplitude: f64,
        cutoff: usize,
        tail: f64,
    },

    #[error("the trace of V(z) diverges at z = 0")]
    TraceDiverges,

    #[error("tail bound {bound:.3e} is not below the tolerance {tol:.3e}")]
    TailTooLarge { bound: f64, tol: f64 },

    #[error("grid incompatible with the space: {0}")]
    GridMismatch(String),

    #[error("operator is not supported inside the safe sector: {0}")]
    NotTraceClass(String),
}

pub type Result<T> = std::result::Result<T, Error>;
