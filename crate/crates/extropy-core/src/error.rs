use thiserror::Error;

/// Errors shared across the estimation, inference and simulation modules.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Input sample violates a structural invariant (empty, nonpositive or
    /// nonfinite values, malformed status flags).
    #[error("invalid sample: {0}")]
    InvalidSample(String),

    /// Fewer observations than the estimator needs.
    #[error("insufficient data: need at least {needed} observations, got {got}")]
    InsufficientData { needed: usize, got: usize },

    /// Dynamic (residual) measure requested at a threshold with fewer than
    /// two sample values above it.
    #[error("insufficient tail: only {got} observations exceed t = {threshold}")]
    InsufficientTail { threshold: f64, got: usize },

    /// Dynamic (past) measure requested at a threshold with fewer than two
    /// sample values at or below it.
    #[error("insufficient head: only {got} observations are <= t = {threshold}")]
    InsufficientHead { threshold: f64, got: usize },

    /// Censored estimator requires at least two event observations.
    #[error("insufficient events: need at least {needed} uncensored observations, got {got}")]
    InsufficientEvents { needed: usize, got: usize },

    /// An event observation sits where the estimated censoring survival has
    /// already reached zero, so its IPCW weight is undefined.
    #[error("degenerate IPCW weight: censoring survival is 0 just before event time {time}")]
    IpcwDegenerate { time: f64 },

    /// Too many bootstrap replicates had to be skipped for the resampling
    /// distribution to be trustworthy.
    #[error("unstable bootstrap: {skipped} of {total} replicates were degenerate")]
    UnstableBootstrap { skipped: usize, total: usize },

    /// Adaptive quadrature failed to reach the requested tolerance.
    #[error("quadrature did not converge: {0}")]
    Numeric(String),

    /// Censoring-rate calibration could not bracket the target probability.
    #[error("calibration failed: {0}")]
    Calibration(String),

    /// Malformed Monte Carlo experiment specification.
    #[error("invalid experiment spec: {0}")]
    InvalidSpec(String),
}

pub type Result<T> = std::result::Result<T, Error>;
