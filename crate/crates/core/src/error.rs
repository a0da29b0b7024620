use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("zero element has no height")]
    ZeroElement,
    #[error("all projective coordinates vanish")]
    AllCoordinatesVanish,
    #[error("zero point has no projective class")]
    ZeroPoint,
    #[error("box holds {count} elements, over the budget of {budget}")]
    BoxTooLarge { count: String, budget: u64 },
    #[error("height bound {0} too small for the sieve inequality")]
    BoundTooSmall(String),
    #[error("hypothesis failed at {stage}: {detail}")]
    HypothesisFailed { stage: String, detail: String },
    #[error("system hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("no nonzero kernel vector")]
    NoKernel,
    #[error("degree too small: {monomials} monomials for {points} points (need more than {required})")]
    DegreeTooSmall { monomials: usize, points: usize, required: usize },
    #[error("invalid hypersurface chain: {0}")]
    ChainInvalid(String),
    #[error("unsupported field: {0}")]
    UnsupportedField(String),
    #[error("invalid field: {0}")]
    InvalidField(String),
    #[error("empty set")]
    EmptySet,
    #[error("parse error: {0}")]
    Parse(String),
    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub fn hypothesis(stage: &str, detail: impl Into<String>) -> Self {
        Error::HypothesisFailed { stage: stage.to_string(), detail: detail.into() }
    }

    /// Short machine-readable tag used in JSON error payloads.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::ZeroElement => "ZeroElement",
            Error::AllCoordinatesVanish => "AllCoordinatesVanish",
            Error::ZeroPoint => "ZeroPoint",
            Error::BoxTooLarge { .. } => "BoxTooLarge",
            Error::BoundTooSmall(_) => "BoundTooSmall",
            Error::HypothesisFailed { .. } => "HypothesisFailed",
            Error::HypothesisViolated(_) => "HypothesisViolated",
            Error::NoKernel => "NoKernel",
            Error::DegreeTooSmall { .. } => "DegreeTooSmall",
            Error::ChainInvalid(_) => "ChainInvalid",
            Error::UnsupportedField(_) => "UnsupportedField",
            Error::InvalidField(_) => "InvalidField",
            Error::EmptySet => "EmptySet",
            Error::Parse(_) => "Parse",
            Error::BudgetExceeded(_) => "BudgetExceeded",
            Error::Io(_) => "Io",
            Error::Json(_) => "Json",
            Error::Csv(_) => "Csv",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
