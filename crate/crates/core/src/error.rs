use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("level must be a positive integer, got 0")]
    ZeroLevel,

    #[error("sieve limit must be at least 2, got {0}")]
    SieveLimitTooSmall(u64),

    #[error("sieve limit {limit} exceeds the supported maximum {max}")]
    SieveLimitTooLarge { limit: u64, max: u64 },

    #[error("range [{lo}, {hi}] is invalid for a sieve table of limit {limit}")]
    RangeOutsideTable { lo: u64, hi: u64, limit: u64 },

    #[error("brute-force evaluation refused: n = {n} exceeds ceiling {ceiling}")]
    BruteForceCeiling { n: u64, ceiling: u64 },

    #[error("upper bound is only defined for N > 2, got {0}")]
    UpperBoundDomain(u64),

    #[error("primorial of {x} overflows 64 bits; largest admissible x is {max_x}")]
    PrimorialOverflow { x: u64, max_x: u64 },

    #[error("genus search up to {x} needs levels up to {required}, beyond capacity {capacity}")]
    CapacityExceeded { x: u64, required: u64, capacity: u64 },

    #[error("Dirichlet series needs real s > 1, got {0}")]
    DirichletDomain(f64),

    #[error("modulus must be an odd prime, got {0}")]
    NotOddPrime(u64),

    #[error("prime limit {prime_limit} must be at least 2*ell = {min}")]
    PrimeLimitTooSmall { prime_limit: u64, min: u64 },

    #[error("tolerance must lie in (0, 1e-6], got {0}")]
    InvalidTolerance(f64),

    #[error("root of {equation} is not bracketed on [{lo}, {hi}]")]
    Bracketing { equation: &'static str, lo: f64, hi: f64 },

    #[error("arithmetic overflow while evaluating level {0}")]
    Overflow(u64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("internal consistency fault at N = {n}: {detail}")]
    Consistency { n: u64, detail: String },
}
