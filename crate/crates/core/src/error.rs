use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("duplicate endpoint {0}: assigned to more than one vertex")]
    DuplicateEndpoint(usize),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("{0}")]
    OutOfRange(String),

    #[error("size limit exceeded: {what} is {actual}, limit {limit}")]
    SizeLimit {
        what: &'static str,
        actual: usize,
        limit: usize,
    },

    #[error("zero localization failed: {0}")]
    Localization(String),

    /// The amplitude vector spans a genuinely complex eigenspace direction.
    #[error("degenerate pair: realification residual {residual:.3e} exceeds tolerance")]
    DegeneratePair { residual: f64 },

    #[error("inconsistent eigenfunction: {0}")]
    InconsistentEigenfunction(String),

    #[error("operation requires a simple eigenvalue, got multiplicity {0}")]
    Multiplicity(usize),

    #[error("numerical inconsistency: {0}")]
    Inconsistency(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("lambda = {lambda} lies within {distance:.3e} of included eigenvalue {eigenvalue}")]
    PoleProximity {
        lambda: f64,
        eigenvalue: f64,
        distance: f64,
    },

    #[error("graph is not equilateral with standard conditions: {0}")]
    NotEquilateral(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
