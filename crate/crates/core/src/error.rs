use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid modulus {0}: must satisfy 2 <= m < 2^31 (2^63 for factorization)")]
    InvalidModulus(u64),

    #[error("value {value} outside [0, {bound})")]
    OutOfRange { value: u64, bound: u64 },

    #[error("cannot reduce Z_{from} to Z_{to}: {to} does not divide {from}")]
    InvalidReduction { from: u64, to: u64 },

    #[error("division by zero")]
    DivisionByZero,

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("{0} is not a prime power")]
    NotPrimePower(u64),

    #[error("polynomial {0:?} is not a valid irreducible monic modulus")]
    NotIrreducible(Vec<u64>),

    #[error("Z_{0} is not a local ring (modulus has several prime factors)")]
    NotLocalRing(u64),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("ring mismatch: {0} vs {1}")]
    RingMismatch(String, String),

    #[error("operation requires a field, got {0}")]
    NotAField(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("sampling failed after {0} attempts")]
    SamplingFailure(u64),

    #[error("enumeration of {0} matrices exceeds the cap of {1}")]
    TooLarge(String, u64),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("total variation undetermined: {0} non-invertible corners share one aggregated mass")]
    IndeterminateResidual(String),

    #[error("format error: {0}")]
    Format(String),
}

impl Error {
    /// True for errors caused by bad caller input rather than internal failure.
    pub fn is_usage(&self) -> bool {
        !matches!(self, Error::SamplingFailure(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
