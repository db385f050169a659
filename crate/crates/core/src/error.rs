use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Invalid model, grid or experiment parameters.
    #[error("configuration error: {0}")]
    Config(String),
    /// A function was evaluated outside the region where it is defined.
    #[error("domain error: {0}")]
    Domain(String),
    /// An iterative method failed to converge or produced non-finite output.
    #[error("numerical failure: {0}")]
    Numerical(String),
    /// Input data (boundary curves, samples) unsuitable for the requested analysis.
    #[error("data error: {0}")]
    Data(String),
    /// The operation's hypotheses do not hold for this model.
    #[error("not applicable: {0}")]
    NotApplicable(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
