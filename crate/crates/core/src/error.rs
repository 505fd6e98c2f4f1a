use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("weights sum to {0}, expected exactly 1")]
    NotNormalized(String),
    #[error("weight {weight} for {outcome} is negative")]
    NegativeWeight { outcome: String, weight: String },
    #[error("distribution has no outcomes")]
    EmptyDistribution,
    #[error("duplicate outcome {0}")]
    DuplicateOutcome(String),
    #[error("duplicate label {0} in carrier")]
    DuplicateLabel(String),
    #[error("predicate value {value} at {outcome} lies outside [0,1]")]
    PredicateRange { outcome: String, value: String },
    #[error("predicate carrier does not cover {0}")]
    MissingCarrier(String),
    #[error("validity is zero, cannot condition on impossible evidence")]
    ZeroValidity,
    #[error("{0} is outside the channel domain")]
    DomainMismatch(String),
    #[error("channel domains differ: {0}")]
    DomainsDiffer(String),
    #[error("pushforward has no mass at {0}; dagger needs full support")]
    NotFullSupport(String),
    #[error("channel is not deterministic at {0}")]
    NotDeterministic(String),
    #[error("declared codomain misses {0}")]
    CodomainTooSmall(String),
    #[error("multiset is empty")]
    EmptyMultiset,
    #[error("carrier has {carrier} elements, needs at least {needed}")]
    CarrierTooSmall { carrier: usize, needed: usize },
    #[error("{0}")]
    OutOfRange(String),
    #[error("n = {n} is smaller than the multiset size {size}")]
    BinomRange { n: usize, size: usize },
    #[error("{0} has no component {1}")]
    NotATuple(String, usize),
    #[error("no disintegration at {0}: zero mass")]
    ZeroMass(String),
    #[error("parameters reach different statistic values: {0}")]
    SupportMismatch(String),
    #[error("parse error at offset {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("parameter must be positive, got {0}")]
    NonPositiveParameter(String),
    #[error("{0}")]
    Usage(String),
    #[error("output failed: {0}")]
    Io(String),
    #[error("output closed")]
    OutputClosed,
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            Error::OutputClosed
        } else {
            Error::Io(e.to_string())
        }
    }
}

impl Error {
    pub(crate) fn parse(pos: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            pos,
            msg: msg.into(),
        }
    }
}
