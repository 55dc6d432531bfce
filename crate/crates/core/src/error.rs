use alloc::string::String;

use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not a prime")]
    NotPrime(u64),

    /// A computation would exceed a configured resource cap.
    #[error("{what} needs {required}, budget is {limit}")]
    Budget {
        what: &'static str,
        required: u128,
        limit: u128,
    },

    #[error("index {index} out of range: {reason}")]
    OutOfRange { index: u64, reason: String },

    #[error("not a 2-local semistable polynomial")]
    NotSemistable,

    /// The filtration-graded expansion failed to raise the weight.
    #[error("weight did not increase at step {step}: {before} -> {after}")]
    WeightStalled {
        step: usize,
        before: String,
        after: String,
    },

    /// Symbolic elimination produced something it should not have. This is a bug.
    #[error("internal consistency check failed: {0}")]
    Inconsistent(String),
}
