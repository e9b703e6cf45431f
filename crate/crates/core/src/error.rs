use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A document or instance failed validation; `path` names the offending field.
    #[error("invalid instance at `{path}`: {message}")]
    Invalid { path: String, message: String },

    #[error("runway `{runway}` does not belong to airport `{airport}`")]
    UnknownRunway { airport: String, runway: String },

    #[error("schedule does not cover flight `{0}`")]
    MissingFlight(String),

    #[error("schedule references unknown flight `{0}`")]
    UnknownFlight(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("flight `{flight}` has no feasible time inside its position-shift window")]
    Infeasible { flight: String },

    #[error("instance has {flights} flights but the exhaustive oracle accepts at most {limit}")]
    TooLarge { flights: usize, limit: usize },

    #[error("invalid solver configuration: {0}")]
    Config(String),

    #[error("solver produced an infeasible schedule ({0} violations)")]
    Internal(usize),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn invalid(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Invalid {
            path: path.into(),
            message: message.into(),
        }
    }
}
