use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
    #[error("missing table entry (a={a}, b={b}, x={x}, y={y})")]
    MissingEntry { a: usize, b: usize, x: usize, y: usize },
    #[error("duplicate table entry (a={a}, b={b}, x={x}, y={y})")]
    DuplicateEntry { a: usize, b: usize, x: usize, y: usize },
    #[error("scenario mismatch: {0}")]
    ScenarioMismatch(String),
    #[error("value out of range: {0}")]
    OutOfRange(String),
    #[error("cap exceeded: {what} needs {needed}, cap is {cap}")]
    CapExceeded { what: String, needed: u128, cap: u128 },
    #[error("behavior is not normalized (residual {0})")]
    Unnormalized(String),
    #[error("projection blow-up: {rows} intermediate rows exceeds bound {bound}")]
    BlowUp { rows: usize, bound: usize },
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("unknown name: {0}")]
    UnknownName(String),
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("malformed input: {0}")]
    Parse(String),
    #[error("internal error: {0}")]
    Internal(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Stable machine-readable tag for structured error reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidScenario(_) => "invalid_scenario",
            Error::MissingEntry { .. } => "missing_entry",
            Error::DuplicateEntry { .. } => "duplicate_entry",
            Error::ScenarioMismatch(_) => "scenario_mismatch",
            Error::OutOfRange(_) => "out_of_range",
            Error::CapExceeded { .. } => "cap_exceeded",
            Error::Unnormalized(_) => "unnormalized",
            Error::BlowUp { .. } => "blow_up",
            Error::Degenerate(_) => "degenerate",
            Error::Dimension(_) => "dimension",
            Error::UnknownName(_) => "unknown_name",
            Error::InvalidGraph(_) => "invalid_graph",
            Error::Precondition(_) => "precondition",
            Error::Parse(_) | Error::Json(_) => "parse",
            Error::Internal(_) => "internal",
            Error::Io(_) => "io",
        }
    }
}
