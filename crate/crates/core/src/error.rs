use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid modulus {0}: every cyclic factor needs modulus >= 2")]
    InvalidModulus(u64),
    #[error("group order overflows the index type")]
    OrderOverflow,
    #[error("{what} of size {size} exceeds the configured cap {cap}")]
    CapExceeded {
        what: &'static str,
        size: u128,
        cap: u128,
    },
    #[error("dimension mismatch: expected {expected} coordinates, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("coordinate {value} out of range for modulus {modulus}")]
    CoordinateOutOfRange { value: u64, modulus: u64 },
    #[error("element index {0} outside the group")]
    IndexOutOfRange(usize),
    #[error("sets live in different groups")]
    GroupMismatch,
    #[error("invalid prime factorization: {0}")]
    InvalidFactorization(String),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("invalid equation: {0}")]
    InvalidEquation(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("modulus {modulus} must exceed every |coefficient| (max {max_coeff})")]
    ModulusTooSmall { modulus: u64, max_coeff: u64 },
    #[error("operation needs a cyclic group of prime order")]
    NotPrimeField,
    #[error(
        "rounding residue {residue:e} exceeds tolerance {tolerance:e}; fall back to brute force"
    )]
    NumericInstability { residue: f64, tolerance: f64 },
    #[error("infeasible parameters: {0}")]
    Infeasible(String),
    #[error("parameter mismatch: {0}")]
    ParamMismatch(String),
    #[error("value out of range: {0}")]
    OutOfRange(String),
}
