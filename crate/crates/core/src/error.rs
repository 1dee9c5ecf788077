use thiserror::Error;

use crate::rational::Rational;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("interval [{lo}, {hi}] has lo > hi")]
    InvertedInterval { lo: Rational, hi: Rational },

    #[error("interval [{lo}, {hi}] leaves [0, 1]")]
    OutOfUnit { lo: Rational, hi: Rational },

    #[error("query interval [{lo}, {hi}] is not inside layer {layer}")]
    OutsideLayer { layer: usize, lo: Rational, hi: Rational },

    #[error("layer index {layer} out of range for a {m}-layer cake")]
    NoSuchLayer { layer: usize, m: usize },

    #[error("requested value {requested} exceeds the {available} available on layer {layer}")]
    InsufficientValue {
        layer: usize,
        requested: Rational,
        available: Rational,
    },

    #[error("target value {target} is never attained")]
    UnattainableTarget { target: Rational },

    #[error("invalid density: {0}")]
    InvalidDensity(String),

    #[error("agent {agent} values the cake at {total}, expected 1")]
    NotNormalized { agent: usize, total: Rational },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("piece is not contiguous and non-overlapping in merged coordinates")]
    NotLiftable,

    #[error("lift produced a piece that is not contiguous and non-overlapping")]
    LiftViolation,

    #[error("no majority switching point among {candidates} candidates")]
    NoMajorityPoint { candidates: usize },

    #[error("{0} agents: a balanced split needs an even count of at least 2")]
    OddAgentCount(usize),

    #[error("two-knife path trace failed: {0}")]
    PathTrace(String),

    #[error("unsupported shape: {m} layers (supported: 2^a * 3^b with b <= 1)")]
    UnsupportedShape { m: usize },

    #[error("protocol precondition violated: {0}")]
    Precondition(String),

    #[error("grid {0} exceeds the enumeration bound of 64")]
    GridTooLarge(u32),

    #[error("malformed rational {0:?}")]
    ParseRational(String),

    #[error("malformed document: {0}")]
    Document(String),

    #[error("agent {agent}: {reason}")]
    InvalidAgent { agent: usize, reason: String },

    #[error("internal invariant violated: {0}")]
    Internal(String),
}
