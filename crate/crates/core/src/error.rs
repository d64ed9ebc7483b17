use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid geometry: {0}")]
    Geometry(String),

    #[error("invalid error map: {0}")]
    ErrorMap(String),

    #[error("degenerate conformity for ball {ball}, diagonal {diagonal}: natural length {length} mm is not positive")]
    DegenerateConformity {
        ball: usize,
        diagonal: usize,
        length: f64,
    },

    #[error("osculation out of Houpert range: s = {0} not in [0.89, 0.99]")]
    OsculationOutOfRange(f64),

    #[error("contact angle undefined: raceway centers of ball {ball}, diagonal {diagonal} coincide")]
    ZeroSpringLength { ball: usize, diagonal: usize },

    #[error("invalid contact input: {0}")]
    Contact(String),

    #[error("index out of range: {0}")]
    Index(String),

    #[error("dimension mismatch: expected {expected}, got {actual} ({what})")]
    Dimension {
        what: &'static str,
        expected: usize,
        actual: usize,
    },

    #[error("invalid ring section: {0}")]
    Section(String),

    #[error("insufficient constraints: {0}")]
    InsufficientConstraints(String),

    #[error("stiffness matrix rejected: {0}")]
    Matrix(String),

    #[error("solver: {0}")]
    Solver(String),

    #[error("configuration: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {message}")]
    Parse { path: String, message: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }

    pub(crate) fn parse(path: impl AsRef<std::path::Path>, message: impl ToString) -> Self {
        Error::Parse {
            path: path.as_ref().display().to_string(),
            message: message.to_string(),
        }
    }
}
