use thiserror::Error;

use crate::channels::PartyId;

/// Errors shared across the simulator.
#[derive(Debug, Error)]
pub enum Error {
    #[error("register size {requested} outside supported range 1..={max}")]
    RegisterSize { requested: usize, max: usize },

    #[error("tensor of {left}+{right} qubits exceeds the {max}-qubit register bound")]
    RegisterOverflow {
        left: usize,
        right: usize,
        max: usize,
    },

    #[error("qubit index {index} out of range for a {num_qubits}-qubit register")]
    QubitOutOfRange { index: usize, num_qubits: usize },

    #[error("two-qubit operation requires distinct operands (got {index} twice)")]
    IdenticalOperands { index: usize },

    #[error("state dimensions differ ({left} vs {right} amplitudes)")]
    DimensionMismatch { left: usize, right: usize },

    #[error("amplitude vector has squared norm {norm_sqr}, expected 1")]
    NotAUnitVector { norm_sqr: f64 },

    #[error("amplitude vector length {len} is not a power of two")]
    NotAPowerOfTwo { len: usize },

    #[error("projection onto a zero-probability outcome")]
    ImpossibleOutcome,

    #[error("qubit {index} is entangled with the rest of the register")]
    NotProductState { index: usize },

    #[error("{party:?} does not hold the qubit it tried to send")]
    CustodyViolation { party: PartyId },

    #[error("{party:?} is not authenticated on the classical bus")]
    UnauthenticatedSender { party: PartyId },

    #[error("qubit role {role} is absent from this register")]
    UnknownRole { role: String },

    #[error("triple {index} was already consumed")]
    TripleConsumed { index: usize },

    #[error("entanglement pool exhausted: {needed} pairs needed, {available} available")]
    PoolExhausted { needed: usize, available: usize },

    #[error("invalid session config: {0}")]
    InvalidConfig(String),

    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("unknown scenario {0:?}")]
    UnknownScenario(String),

    #[error("unknown report format {0:?} (expected json or csv)")]
    UnknownFormat(String),

    #[error("invalid message string: {0}")]
    InvalidMessage(String),
}

pub type Result<T> = std::result::Result<T, Error>;
