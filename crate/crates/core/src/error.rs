use thiserror::Error;

/// A model-file syntax or semantic error, tagged with its 1-based line (0 when not tied to a line).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

impl ParseError {
    pub fn new(line: usize, message: impl Into<String>) -> Self {
        ParseError {
            line,
            message: message.into(),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error("unknown variable `{0}`")]
    UnknownVariable(String),

    #[error("influence endpoints do not match: {0}")]
    EndpointMismatch(String),

    #[error("no influence {0} -> {1}")]
    MissingInfluence(String, String),

    #[error("node `{node}` cannot be removed: {reason}")]
    NotRemovable { node: String, reason: String },

    #[error("arc {from} -> {to} cannot be reversed: {reason}")]
    NotReversible {
        from: String,
        to: String,
        reason: String,
    },

    #[error("invalid network: {0}")]
    InvalidNetwork(String),

    #[error("node `{0}` has no predecessors")]
    NoPredecessors(String),

    #[error("order over {0} variables exceeds the explicit construction limit")]
    OrderTooLarge(usize),

    #[error("assignment does not match the order's variables: {0}")]
    AssignmentMismatch(String),

    #[error("contradictory constraints on `{node}`: {detail}")]
    Infeasible { node: String, detail: String },

    #[error("network has no decision variables")]
    NoDecisions,

    #[error("strategy does not fit the network: {0}")]
    StrategyMismatch(String),

    #[error("invalid mixture weights: {0}")]
    InvalidWeights(String),

    #[error("weight cannot be evaluated: {0}")]
    UnresolvableWeight(String),

    #[error("network too large for exact enumeration ({0} chance variables)")]
    TooLarge(usize),

    #[error("oracle contradicts a symbolic proof: {0}")]
    OracleContradiction(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
