use thiserror::Error;

/// Errors raised while building or evaluating angular control charts.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum AccError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("probability {0} is outside the open interval (0, 1)")]
    ProbabilityDomain(f64),

    #[error("negative input {0} where a non-negative value is required")]
    NegativeInput(f64),

    #[error("states {first} and {other} use different distribution families")]
    MixedFamily { first: String, other: String },

    #[error("states {first} and {other} use different shape parameters")]
    MixedShape { first: String, other: String },

    #[error("duplicate state label {0}")]
    DuplicateLabel(String),

    #[error("system has no states")]
    EmptySystem,

    #[error("observation {seq}: unknown state index {state}")]
    UnknownState { seq: u64, state: usize },

    #[error("observation {seq}: sequence numbers must be strictly increasing")]
    SequenceOrder { seq: u64 },

    #[error("observation {seq}: time-to-failure {ttf} is not a non-negative number")]
    InvalidTtf { seq: u64, ttf: f64 },

    #[error("state {0} is not exponential; only exponential states can be lifted to Erlang")]
    NonExponential(String),

    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("bracket search did not converge: {0}")]
    Convergence(String),

    #[error("drawable area is empty ({width} x {height} px)")]
    DegenerateCanvas { width: f64, height: f64 },
}

pub type Result<T> = std::result::Result<T, AccError>;
