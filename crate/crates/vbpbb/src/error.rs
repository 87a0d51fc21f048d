//! Error types shared across the crate.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors produced by series construction, filtering, bootstrapping, and I/O.
#[derive(Debug, Error)]
pub enum Error {
    /// A series must contain at least one observation.
    #[error("series is empty")]
    EmptySeries,

    /// Every observation must be a finite number.
    #[error("non-finite value at index {index}")]
    NonFinite { index: usize },

    /// Population denominators must be strictly positive to form rates.
    #[error("population {value} is not strictly positive")]
    InvalidPopulation { value: f64 },

    /// The series is too short for the requested operation.
    #[error("{context}: series of length {actual} is shorter than the required {required}")]
    InsufficientData {
        context: String,
        required: usize,
        actual: usize,
    },

    /// Filter window lengths must be odd so the window is symmetric.
    #[error("window length {m} is even; an odd length is required")]
    EvenWindow { m: usize },

    /// A parameter was outside its valid range.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A rational frequency string could not be parsed.
    #[error("invalid frequency {text:?}: {reason}")]
    InvalidFrequency { text: String, reason: String },

    /// Component valid ranges share no common day, so no combined band exists.
    #[error("component valid ranges are disjoint; no overlap to aggregate")]
    DisjointRanges,

    /// Aggregation was requested with nothing to aggregate.
    #[error("no components to aggregate")]
    EmptyCombination,

    /// A CSV row failed structural validation.
    #[error("line {line}: {reason}")]
    MalformedRow { line: usize, reason: String },

    /// Input dates must advance one day at a time.
    #[error("line {line}: expected date {expected}, found {found}")]
    DateGap {
        line: usize,
        expected: String,
        found: String,
    },

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    /// The run configuration file was syntactically or semantically invalid.
    #[error("config error: {0}")]
    Config(String),

    /// An error raised while processing a named component.
    #[error("component {label:?}: {source}")]
    Component {
        label: String,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    /// Helper for the common "need at least this many points" case.
    pub fn insufficient(context: impl Into<String>, required: usize, actual: usize) -> Self {
        Error::InsufficientData {
            context: context.into(),
            required,
            actual,
        }
    }

    /// Wraps an error with the label of the component being processed.
    pub fn for_component(label: impl Into<String>, source: Error) -> Self {
        Error::Component {
            label: label.into(),
            source: Box::new(source),
        }
    }
}
