use crate::wire::DecodeError;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("degenerate message: v + x = 0 mod q")]
    DegenerateMessage,
    #[error("opening does not match commitment")]
    OpeningMismatch,
    #[error("plaintext out of range for this modulus")]
    PlaintextTooLarge,
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("not a permutation of [0, {0})")]
    NotAPermutation(usize),
    #[error("missing contribution from party {0}")]
    MissingParty(usize),
    #[error("duplicate contribution from party {0}")]
    DuplicateParty(usize),
    #[error("beaver triple pool exhausted")]
    TriplesExhausted,
    #[error("dpk nonces already consumed")]
    NonceReused,
    #[error("dpk round 2 before round 1")]
    RoundOrder,
    #[error("paillier sum may exceed N: {0}")]
    Wraparound(String),
    #[error("protocol error: {0}")]
    Protocol(String),
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Decode(#[from] DecodeError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
