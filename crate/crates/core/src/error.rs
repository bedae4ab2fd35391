use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: String,
        found: String,
    },

    /// Smallest pivot magnitude fell below `rank_threshold * largest`.
    #[error("matrix is rank deficient: pivot magnitude {pivot:e} vs largest {largest:e}")]
    RankDeficient { pivot: f64, largest: f64 },

    #[error("invalid problem: {0}")]
    InvalidProblem(String),

    #[error("non-finite value {value} at {location}")]
    NonFinite { location: String, value: f64 },

    #[error("problem has {n} variables, exhaustive search is capped at {cap}")]
    TooLarge { n: usize, cap: usize },

    #[error("column {column} is identically zero")]
    DegenerateColumn { column: usize },

    #[error("invalid spec: {0}")]
    InvalidSpec(String),

    #[error("parse error in {source_name}: {message}")]
    Parse {
        source_name: String,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn dims(
        context: &'static str,
        expected: impl ToString,
        found: impl ToString,
    ) -> Self {
        Error::DimensionMismatch {
            context,
            expected: expected.to_string(),
            found: found.to_string(),
        }
    }

    /// Stable numeric code shared by the CLI exit status and the C ABI.
    pub fn code(&self) -> i32 {
        match self {
            Error::Io(_) => 1,
            Error::Parse { .. } => 2,
            Error::DimensionMismatch { .. } | Error::InvalidProblem(_) | Error::NonFinite { .. } => {
                3
            }
            Error::RankDeficient { .. } => 4,
            Error::InvalidSpec(_) | Error::TooLarge { .. } | Error::DegenerateColumn { .. } => 5,
        }
    }
}
