use thiserror::Error;

/// Errors raised by the channel, allocation and solver routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum SwiptError {
    #[error("invalid dimensions: {0}")]
    Dimension(String),

    #[error("degenerate channel: all singular values are numerically zero")]
    DegenerateChannel,

    #[error("domain error: {0}")]
    Domain(String),

    #[error("rate requirement {rate_req} bps/Hz is infeasible (maximum {max_rate} bps/Hz)")]
    InfeasibleRate { rate_req: f64, max_rate: f64 },

    /// A bracketing root finder saw no sign change. Never resolved by clamping.
    #[error("no sign change in bracket: {0}")]
    NumericalBracket(String),

    #[error("high-SNR approximation not applicable: {0}")]
    ApproximationInapplicable(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, SwiptError>;
