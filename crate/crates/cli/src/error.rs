use famzeta_core::Error as CoreError;
use std::fmt;

/// A failure together with the process exit code it maps to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CliError {
    /// Bad arguments or unparseable parameter specs: exit 2.
    Usage(String),
    /// Invalid family, bad base curve, singular family: exit 3.
    BadFamily(String),
    /// `r̄(γ̄) = 0`, or a parameter the cache cannot cover: exit 4.
    BadParameter(String),
    /// Precision or internal invariant failure, oracle mismatch: exit 5.
    Internal(String),
    /// I/O failure, corrupted or incompatible cache: exit 6.
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::BadFamily(_) => 3,
            CliError::BadParameter(_) => 4,
            CliError::Internal(_) => 5,
            CliError::Io(_) => 6,
        }
    }

    /// Classifies a library error raised while building or validating a
    /// family.
    pub fn from_family(e: CoreError) -> Self {
        match e {
            CoreError::NotOddPrime(_)
            | CoreError::InvalidInput(_)
            | CoreError::Reducible(_)
            | CoreError::BadBaseCurve
            | CoreError::GenericallySingular => CliError::BadFamily(e.to_string()),
            other => Self::from_pipeline(other),
        }
    }

    /// Classifies a library error raised while specialising.
    pub fn from_pipeline(e: CoreError) -> Self {
        match e {
            CoreError::BadParameter => CliError::BadParameter(
                "bad parameter: r(gamma) = 0, the fibre over gamma is singular (discriminant vanishes)".into(),
            ),
            CoreError::CacheTooSmall { .. } => CliError::BadParameter(e.to_string()),
            CoreError::InvalidInput(_) | CoreError::Reducible(_) => CliError::Usage(e.to_string()),
            CoreError::CapExceeded { .. } => CliError::Usage(e.to_string()),
            _ => CliError::Internal(e.to_string()),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::BadFamily(m) => write!(f, "bad family: {m}"),
            CliError::BadParameter(m) => write!(f, "{m}"),
            CliError::Internal(m) => write!(f, "internal error: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

pub type CliResult<T> = std::result::Result<T, CliError>;
