use thiserror::Error;

/// Errors raised by the simulator, the readout trainer and the task drivers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A caller-supplied argument is outside the operation's domain.
    #[error("invalid argument: {0}")]
    Argument(String),

    /// An input failed a structural check (Hermiticity, finiteness, normalization).
    #[error("validation failed: {0}")]
    Validation(String),

    /// A computed quantity violated an invariant beyond its tolerance.
    #[error("numerical integrity violated: {0}")]
    NumericalIntegrity(String),

    /// The metric is undefined for this input, e.g. a constant target.
    #[error("undefined metric: {0}")]
    UndefinedMetric(String),

    /// The operation requires a non-degenerate spectrum.
    #[error("degenerate spectrum: minimum gap {gap:e} below threshold {threshold:e}")]
    Degeneracy { gap: f64, threshold: f64 },

    /// The requested mode is not supported by this operation.
    #[error("unsupported mode: {0}")]
    Unsupported(String),

    /// The problem exceeds the dense-representation limits.
    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),

    /// A closed-loop run produced a non-finite or runaway feedback value.
    #[error("closed loop diverged at step {step}: {reason}")]
    Divergence { step: usize, reason: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn argument(msg: impl Into<String>) -> Error {
    Error::Argument(msg.into())
}

pub(crate) fn validation(msg: impl Into<String>) -> Error {
    Error::Validation(msg.into())
}

pub(crate) fn integrity(msg: impl Into<String>) -> Error {
    Error::NumericalIntegrity(msg.into())
}
