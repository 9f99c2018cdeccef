use thiserror::Error;

use crate::geometry::{NodeId, UserClass};

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// `K1*K2*M/N` is not an integer, so there is no MN corner point to run.
    #[error("unsupported memory point: K1K2*M/N = {numer}/{denom} is not an integer")]
    UnsupportedMemoryPoint { numer: u64, denom: u64 },

    #[error("incomplete demand: no request for {class} user anchored at {anchor}")]
    IncompleteDemand { class: UserClass, anchor: NodeId },

    #[error("decode failure for {class} user at {anchor}: {reason}")]
    DecodeFailure {
        class: UserClass,
        anchor: NodeId,
        reason: String,
    },

    /// Packet needed by a user but neither cached nor recoverable.
    #[error("undecodable: {missing} packet(s) missing, first is file {file} subset {subset:?}")]
    MissingPackets {
        missing: usize,
        file: usize,
        subset: Vec<NodeId>,
    },

    #[error("{class} user at {anchor} can reconstruct {found} signals, fewer than the required {required}")]
    CountingViolation {
        class: UserClass,
        anchor: NodeId,
        found: usize,
        required: usize,
    },

    #[error("division by zero in GF(2^{degree})")]
    DivisionByZero { degree: u32 },

    #[error("singular system of size {0}")]
    SingularSystem(usize),

    #[error("MDS property violated: {0}")]
    MdsViolation(String),

    #[error("field exhausted: need {needed} distinct elements, largest field has {available}")]
    FieldExhausted { needed: usize, available: usize },

    #[error("insufficient side information: know {known} of {n} signals, need at least {required}")]
    InsufficientSideInformation {
        known: usize,
        n: usize,
        required: usize,
    },

    #[error("degenerate code: h = {h} >= n = {n}")]
    Degenerate { h: usize, n: usize },

    #[error("oracle refused: {0}")]
    OracleRefused(String),

    #[error("undefined ratio: {0}")]
    UndefinedRatio(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
