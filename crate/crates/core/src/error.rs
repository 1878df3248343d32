use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpinError {
    #[error("a spin chain needs at least one spin")]
    NoSpins,
    #[error("{n} spins exceed the dimension cap of {cap} spins")]
    DimensionCap { n: usize, cap: usize },
    #[error("dense representation limited to {max} spins, got {n}")]
    DenseTooLarge { n: usize, max: usize },
    #[error("basis mismatch: {left} spins vs {right} spins")]
    BasisMismatch { left: usize, right: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("state is not normalized (norm {0})")]
    NotNormalized(f64),
    #[error("non-finite amplitude encountered at t = {time}")]
    NonFinite { time: f64 },
    #[error("norm drift {drift:e} exceeds tolerance at t = {time}")]
    NormDrift { time: f64, drift: f64 },
    #[error("exponential series did not converge (|H|dt too large, dt = {dt})")]
    SeriesDiverged { dt: f64 },
    #[error("fringe derivative below threshold on the whole grid")]
    FlatFringe,
}

pub type Result<T> = std::result::Result<T, SpinError>;

pub(crate) fn invalid(msg: impl Into<String>) -> SpinError {
    SpinError::InvalidParameter(msg.into())
}
