/// Errors shared across the crate.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("event id must not be empty")]
    EmptyEventId,

    #[error("hash family needs m >= 1 counters and k >= 1 hash functions (got m={m}, k={k})")]
    InvalidFamily { m: usize, k: usize },

    #[error("clocks belong to different hash families and cannot be combined or compared")]
    IncompatibleClocks,

    #[error(
        "false-positive rate needs sum(b) >= sum(a), got a_sum={a_sum} > b_sum={b_sum}; \
         swap the arguments"
    )]
    SumOrder { a_sum: u64, b_sum: u64 },

    #[error("node {node} is outside the {nodes}-node set")]
    UnknownNode { node: usize, nodes: usize },

    #[error("vector clocks cover different node sets ({left} vs {right} nodes)")]
    NodeSetMismatch { left: usize, right: usize },

    #[error("history entries must be slot-wise non-decreasing; the new clock drops below seq {last_seq}")]
    HistoryOrder { last_seq: u64 },

    #[error("previous clock is not dominated by the next clock; the pair has no tick provenance")]
    NotDominated,

    #[error("counter plus offset overflows the 64-bit logical value range")]
    CounterOverflow,

    #[error("invalid simulation config: {0}")]
    InvalidConfig(String),

    #[error("monte carlo estimation needs at least one trial")]
    NoTrials,

    #[error("decode failed at byte {offset}: {reason}")]
    Decode { offset: usize, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;
