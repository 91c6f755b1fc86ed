//! Exact probability calculus over finite alphabets.
//!
//! Every quantity is computed by enumeration of a dense probability tensor,
//! so results are exact up to floating-point accumulation. Logarithms are
//! base 2 and `0 log 0 = 0`.

mod alphabet;
mod channel;
mod function;
mod pmf;

pub use alphabet::{Alphabet, VarSet};
pub use channel::Channel;
pub use function::FunctionSpec;
pub use pmf::{JointPmf, DEFAULT_MAX_ENTRIES};
pub(crate) use pmf::{checked_product_len, strides_for};

use thiserror::Error;

/// Absolute tolerance on the total mass of an input distribution and on
/// channel row sums.
pub const NORMALIZATION_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProbError {
    #[error("alphabet must have at least one symbol")]
    EmptyAlphabet,

    #[error("alphabet labels: {0}")]
    BadLabels(String),

    #[error("variable index {index} out of range for arity {arity}")]
    IndexOutOfRange { index: usize, arity: usize },

    #[error("variable {0} listed twice in a variable set")]
    DuplicateIndex(usize),

    #[error("variable sets overlap on position {0}")]
    OverlappingSets(usize),

    #[error("tensor has {actual} entries, alphabets require {expected}")]
    ShapeMismatch { expected: usize, actual: usize },

    #[error("state space of {required} entries exceeds limit {limit}")]
    TooLarge { required: u128, limit: usize },

    #[error("entry {index} is negative or not finite: {value}")]
    BadProbability { index: usize, value: f64 },

    #[error("probabilities sum to {0}, expected 1")]
    NotNormalized(f64),

    #[error("channel row {row} sums to {sum}, expected 1")]
    NotStochastic { row: usize, sum: f64 },

    #[error("alphabet mismatch: {0}")]
    AlphabetMismatch(String),

    #[error("function table entry {index} = {value} outside codomain of size {size}")]
    OutsideCodomain { index: usize, value: usize, size: usize },
}

pub(crate) fn xlog2x(p: f64) -> f64 {
    if p > 0.0 {
        p * p.log2()
    } else {
        0.0
    }
}
