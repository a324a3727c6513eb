use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected length {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("stabilizers do not commute: X check at {x_site} and Z check at {z_site}")]
    NonCommuting { x_site: String, z_site: String },

    #[error("code has no qubits")]
    EmptyCode,

    #[error("no logical qubits")]
    NoLogicals,

    #[error("invalid stretch: {0}")]
    Stretch(String),

    #[error("invalid cut: {0}")]
    Cut(String),

    #[error("deformed code does not have the expected block form: {0}")]
    BlockForm(String),

    #[error("no measurement channel for the target operator")]
    NoChannel,

    #[error("target operator is not in the span of the logical basis")]
    TargetOutsideSpan,

    #[error("deformed code measures non-target logicals")]
    MeasuresNonTarget,

    #[error("infeasible storage pairing: {0}")]
    InfeasiblePairing(String),

    #[error(
        "painting failed on storage {storage}: no gauge vector anticommutes with a weight-{weight} error"
    )]
    PaintFailure { storage: usize, weight: usize },

    #[error("invalid storage: {0}")]
    InvalidStorage(String),

    #[error("logical basis search failed: {0}")]
    BasisSearch(String),

    #[error("{cols} columns exceed the exhaustive enumeration cap of {cap}")]
    TooLarge { cols: usize, cap: usize },

    #[error("schedule planning failed: {0}")]
    Schedule(String),

    #[error("cannot render: {0}")]
    Render(String),

    #[error("schema error: {0}")]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Errors caused by malformed input rather than by an algorithm that ran
    /// and failed.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::Dimension { .. }
                | Error::Config(_)
                | Error::Json(_)
                | Error::Io(_)
                | Error::Stretch(_)
                | Error::Cut(_)
                | Error::TargetOutsideSpan
                | Error::TooLarge { .. }
                | Error::Render(_)
        )
    }
}
