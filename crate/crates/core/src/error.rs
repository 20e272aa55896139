use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Argument outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Selected design columns are linearly dependent.
    #[error("singular design: column(s) {} are linearly dependent on earlier columns", .columns.join(", "))]
    SingularDesign { columns: Vec<String> },

    /// The fit interpolates the response exactly, so likelihood ratios are undefined.
    #[error("degenerate fit: residual sum of squares is zero for model {model}")]
    DegenerateFit { model: String },

    /// Linear predictor or likelihood became non-finite.
    #[error("numerical overflow: {0}")]
    Overflow(String),

    /// Input data failed validation.
    #[error("invalid data: {0}")]
    Validation(String),

    /// Response value not admissible for the family.
    #[error("invalid response in row {row}: {reason}")]
    InvalidResponse { row: usize, reason: String },

    /// Inconsistent use of the API.
    #[error("usage error: {0}")]
    Usage(String),

    /// Model search exceeds the exhaustive enumeration limit.
    #[error("exhaustive search over {p} predictors exceeds the limit of {limit}")]
    SearchTooLarge { p: usize, limit: usize },

    /// A fit failed while scanning candidate models.
    #[error("fit of model {model} failed: {source}")]
    Candidate {
        model: String,
        #[source]
        source: Box<Error>,
    },

    /// No model of size at most the cap lies in the confidence region.
    #[error("no model of size <= {max_size} lies inside the likelihood-ratio region (threshold {threshold})")]
    EmptyRegion { max_size: usize, threshold: f64 },

    /// An internal consistency check failed.
    #[error("internal consistency error: {0}")]
    Internal(String),

    /// Too many simulation replications failed.
    #[error("{failed} of {total} simulation trials failed (limit 1%): first error: {first}")]
    TooManyFailures {
        failed: usize,
        total: usize,
        first: String,
    },

    #[error("I/O error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
