use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("unsupported distribution for this operation: {0}")]
    Unsupported(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("index {index} out of range (largest allowed {max})")]
    OutOfRange { index: usize, max: usize },
    #[error("non-finite value encountered: {0}")]
    NonFinite(String),
    #[error("acceptance probability {estimate:.2e} below 1e-3 on the pilot batch; radius factor too small")]
    LowAcceptance { estimate: f64 },
    #[error("insufficient samples: need at least {needed}, have {have}")]
    InsufficientSamples { needed: usize, have: usize },
    #[error("eta schedule violates its constraints at s = {s}: {detail}")]
    EtaInvariant { s: usize, detail: String },
    #[error("size limit exceeded: {0}")]
    SizeLimit(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("output file {0} already exists")]
    OutputExists(String),
    #[error("i/o: {0}")]
    Io(String),
}

impl Error {
    /// Failures of the computation itself, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Self::Numerical(_) | Self::NonFinite(_))
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Self::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidParameter(msg.into()))
}
