use thiserror::Error;

/// Errors raised by the library. Verification *failures* are not errors; they
/// are reported through [`crate::congruence::CongruenceReport`] and friends.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("series is not invertible: constant term {0} is not a unit")]
    NotInvertible(String),

    #[error("brute-force oracle range exceeded: n = {n} > bound {bound}")]
    OracleRange { n: u64, bound: u64 },

    #[error("malformed eta-quotient spec {input:?}: {reason}")]
    MalformedSpec { input: String, reason: String },

    #[error("coefficient table too short: need order {required}, have {available}")]
    TableTooShort { required: usize, available: usize },

    #[error("({i}, {j}) is not covered by the Z-profile theorems (need j in {{0, 1}}, or i a power of two >= 4)")]
    UncoveredZFamily { i: u32, j: u32 },

    #[error("k = {k} is outside the supported range: {reason}")]
    IndexOutOfRange { k: u32, reason: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
