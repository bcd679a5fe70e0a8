use thiserror::Error;

#[derive(Debug, Error)]
pub enum SpectralError {
    #[error("cutoff mismatch: {left} vs {right}")]
    CutoffMismatch { left: usize, right: usize },
    #[error("cutoff must be at least 1")]
    EmptyField,
    #[error("non-finite Fourier coefficient at mode {mode}")]
    NonFinite { mode: usize },
    #[error("field is in the death state (blow-up at t = {blowup_time})")]
    Dead { blowup_time: f64 },
    #[error("time grid must be strictly increasing ({previous} then {next})")]
    NonIncreasingTime { previous: f64, next: f64 },
    #[error("only {usable} usable blocks in the fit range, need at least 4")]
    TooFewBlocks { usable: usize },
    #[error("{got} samples supplied, need at least {need}")]
    TooFewSamples { got: usize, need: usize },
    #[error("malformed field file: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, SpectralError>;
