use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed graph: {0}")]
    MalformedGraph(String),
    #[error("invalid graph: {}", .0.join("; "))]
    InvalidGraph(Vec<String>),
    #[error("subcurve not proper/nonempty")]
    InvalidSubcurve,
    #[error("graph is disconnected")]
    Disconnected,
    #[error("stability parameter does not match graph: {0}")]
    GraphMismatch(String),
    #[error("stability parameter values sum to {0}, expected 0")]
    NonzeroTotal(String),
    #[error("unknown edge id {0} in sheaf datum")]
    UnknownEdge(u32),
    #[error("degenerate parameter: stable ≠ semistable ambiguity")]
    DegenerateParameter,
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("twist data violates k(2-2g) + sum(a) = 0: {0}")]
    DegreeConstraint(String),
    #[error("trivial twist")]
    TrivialTwist,
    #[error("stability table is missing vines: {}", .0.join(", "))]
    IncompleteTable(Vec<String>),
    #[error("could not construct parameter on vine {0}")]
    Construction(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
