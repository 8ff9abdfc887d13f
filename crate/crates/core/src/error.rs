use thiserror::Error;

/// Errors produced by the library. Variants are coarse on purpose: callers
/// mostly report them, the CLI maps them to a machine-readable error line.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid basis index (n={n}, i={i}): position must lie in 0..2^n")]
    InvalidIndex { n: u32, i: u64 },

    #[error("point {0} lies outside [0,1]")]
    Domain(f64),

    #[error("level {level} exceeds the supported maximum {max}")]
    DepthLimit { level: u32, max: u32 },

    #[error("grid of level {level} exceeds the memory budget of level {budget}")]
    Capacity { level: u32, budget: u32 },

    #[error("malformed input: {0}")]
    Malformed(String),

    #[error("unknown schedule '{0}'")]
    UnknownSchedule(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("coefficient schedule is not summable: {0}")]
    NotSummable(String),

    #[error("range [{lo}, {hi}] is not covered by the supplied patches; first gap at {gap}")]
    Coverage { lo: f64, hi: f64, gap: f64 },

    #[error("positivity not certified: lower bound {0} <= 0")]
    NotPositive(f64),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("query {query} outside the modulus table range [0, {max}]")]
    OutOfTable { query: f64, max: f64 },

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Short stable tag used on machine-readable error lines.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidIndex { .. } => "invalid_index",
            Error::Domain(_) => "domain",
            Error::DepthLimit { .. } => "depth_limit",
            Error::Capacity { .. } => "capacity",
            Error::Malformed(_) => "malformed",
            Error::UnknownSchedule(_) => "unknown_schedule",
            Error::InvalidParameter(_) => "invalid_parameter",
            Error::NotSummable(_) => "not_summable",
            Error::Coverage { .. } => "coverage",
            Error::NotPositive(_) => "not_positive",
            Error::Precondition(_) => "precondition",
            Error::OutOfTable { .. } => "out_of_table",
            Error::Io(_) => "io",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Malformed(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
