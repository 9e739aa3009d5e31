use thiserror::Error;

/// Everything that can go wrong inside the engine.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("p = 2 is not supported; the prime must be odd")]
    EvenPrime,
    #[error("invalid context: {0}")]
    InvalidContext(String),
    #[error("operands live over different primes ({0} and {1})")]
    PrimeMismatch(u64, u64),
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("division by a value that is zero to the working precision")]
    DivisionByZero,
    #[error("valuation of a value that is zero to the working precision")]
    ZeroValuation,
    #[error("expected a p-adic unit (valuation 0), got valuation {0}")]
    NotAUnit(i64),
    #[error("cannot decompose a value that is zero to the working precision")]
    ZeroDecomposition,
    #[error("argument outside the domain of convergence: {0}")]
    OutOfDomain(String),
    #[error("series did not reach the target precision within {0} terms")]
    TruncationFailure(usize),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("pole at s = 1: s - 1 is zero to the working precision")]
    PoleAtOne,
    #[error("not converged: {0}")]
    NotConverged(String),
    #[error("cannot parse {input:?}: {reason}")]
    Parse { input: String, reason: String },
}

impl Error {
    /// Process exit code associated with this error: 3 for convergence caps,
    /// 2 for everything else (bad input, domain and pole violations).
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::NotConverged(_) | Error::TruncationFailure(_) => 3,
            _ => 2,
        }
    }

    pub(crate) fn parse(input: &str, reason: impl Into<String>) -> Self {
        Error::Parse {
            input: input.to_string(),
            reason: reason.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
