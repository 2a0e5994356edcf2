use thiserror::Error;

/// Every failure the library can report. Callers map these onto exit codes.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{0} is not an odd prime")]
    NotOddPrime(u64),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("polynomial is reducible: {0}")]
    Reducible(String),
    #[error("bad base curve: Q(X, 0) is not squarefree modulo p")]
    BadBaseCurve,
    #[error("family is generically singular: the discriminant resultant vanishes")]
    GenericallySingular,
    #[error("bad parameter: r(gamma) = 0, the fibre is singular")]
    BadParameter,
    #[error("valuation budget exceeded in {what}: shift {shift} > budget {budget}")]
    BudgetExceeded {
        what: &'static str,
        shift: u32,
        budget: u32,
    },
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("not invertible: {0}")]
    NotInvertible(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("parameter needs extension degree {needed}, cache supports at most {available}")]
    CacheTooSmall { needed: usize, available: usize },
    #[error("enumeration of {size} points exceeds the cap {cap}")]
    CapExceeded { size: String, cap: u64 },
    #[error("inconsistent point counts: {0}")]
    InconsistentCounts(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn budget(what: &'static str, shift: u32, budget: u32) -> Result<()> {
    if shift > budget {
        Err(Error::BudgetExceeded {
            what,
            shift,
            budget,
        })
    } else {
        Ok(())
    }
}
