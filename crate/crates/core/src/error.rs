use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A schedule or strategy parameter is outside its valid domain.
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    ParameterDomain {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    /// An operation input is outside its domain.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("degenerate weight at lambda = {lambda}: density {density:e} underflows")]
    DegenerateWeight { lambda: f64, density: f64 },

    #[error("degenerate conversion at lambda = {lambda}: sigma {sigma:e} underflows")]
    DegenerateConversion { lambda: f64, sigma: f64 },

    #[error("training diverged at step {step}: loss = {loss}")]
    TrainingDivergence { step: u64, loss: f64 },

    #[error("sampling diverged at step {step}")]
    SamplingDivergence { step: usize },

    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),

    #[error("checkpoint: {0}")]
    Checkpoint(String),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
