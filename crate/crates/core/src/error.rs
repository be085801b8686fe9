use std::path::PathBuf;

use thiserror::Error;

/// Every failure the engine can report.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    // exact algebra
    #[error("series is not a unit: its t^0 coefficient is not an invertible constant")]
    NotAUnit,
    #[error("cannot expand an exact non-constant series inverse without a truncation order")]
    UnboundedOrder,

    // model and automaton input
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("unknown step `{0}`")]
    UnknownStep(String),
    #[error("invalid step `{name}`: length must be at least 1, got {length}")]
    InvalidStep { name: String, length: i64 },
    #[error("duplicate step: {0}")]
    DuplicateStep(String),
    #[error("transition references state {state}, but the automaton has {states} states")]
    DanglingState { state: usize, states: usize },
    #[error("state {state} has two transitions on step `{step}`")]
    Nondeterministic { state: usize, step: String },
    #[error("unsupported step set: {0}")]
    UnsupportedStepSet(String),
    #[error("cannot read {path}: {message}")]
    Io { path: PathBuf, message: String },

    // kernel and generating functions
    #[error("degenerate kernel: K(0,u) is not 1")]
    DegenerateKernel,
    #[error("boundary polynomial is not divisible by the small factor (remainder {0})")]
    NonzeroRemainder(String),
    #[error("coefficient {n} requested but the series is only known to order {order}")]
    OutOfOrder { n: usize, order: usize },
    #[error("odd coefficient t^{0} is nonzero; semilength substitution does not apply")]
    OddCoefficientPresent(usize),

    // oracle
    #[error("enumeration limited to length {limit}, got {requested}")]
    LimitExceeded { requested: usize, limit: usize },

    // asymptotics
    #[error("empty class: h(1) = 0")]
    EmptyClass,
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("zero variance")]
    ZeroVariance,

    // cli
    #[error("spec has no marked statistic")]
    NoMarkInSpec,
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }

    /// True for errors caused by malformed user input (specs, automaton files, flags).
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::Parse { .. }
                | Error::UnknownStep(_)
                | Error::InvalidStep { .. }
                | Error::DuplicateStep(_)
                | Error::DanglingState { .. }
                | Error::Nondeterministic { .. }
                | Error::UnsupportedStepSet(_)
                | Error::Io { .. }
                | Error::InvalidConfig(_)
                | Error::NoMarkInSpec
                | Error::OddCoefficientPresent(_)
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
