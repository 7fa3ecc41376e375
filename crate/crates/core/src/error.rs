use thiserror::Error;

/// Errors raised anywhere in the library.
///
/// Variants fall into three families that the CLI maps onto exit codes:
/// specification/parse errors, resource or precision limits, and internal
/// invariant violations that indicate a bug.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("invalid modulus: {0}")]
    InvalidModulus(String),
    #[error("residue is not a unit modulo {0}")]
    NotAUnit(String),
    #[error("polynomial derivative vanishes mod p at the starting point")]
    NotASimpleRoot,
    #[error("starting point is not a root modulo p^{0}")]
    NotARoot(u32),
    #[error("{0} is divisible by p")]
    DivisibleByP(u64),
    #[error("no element of order {m} exists modulo {p} ({m} does not divide p-1)")]
    OrderUnavailable { m: u64, p: u64 },
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("modulus mismatch: {0} vs {1}")]
    ModulusMismatch(String, String),
    #[error("precision too low: {0}")]
    PrecisionTooLow(String),
    #[error("precision ceiling p^{0} reached without stabilizing")]
    PrecisionCeiling(u32),
    #[error("trace average is not an integer rank (sum {sum}, order {order})")]
    NonIntegralRank { sum: u64, order: u64 },
    #[error("group closure exceeded cap of {0} elements")]
    CapExceeded(usize),
    #[error("reduction to p^{0} is not faithful")]
    UnfaithfulReduction(u32),
    #[error("invalid group specification: {0}")]
    SpecInvalid(String),
    #[error("rank polynomial does not factor into linear terms")]
    NotFactorable,
    #[error("orbit count is not integral: {0}")]
    NonIntegralCount(String),
    #[error("closed form is not integral: {0}")]
    NonIntegralResult(String),
    #[error("point space of {0} points exceeds cap {1}")]
    SpaceTooLarge(u128, u128),
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Broad category used for exit codes and machine-readable error reports.
    pub fn kind(&self) -> ErrorKind {
        use Error::*;
        match self {
            NotPrime(_) | InvalidModulus(_) | SpecInvalid(_) | Parse(_) | OrderUnavailable { .. }
            | DimensionMismatch(..) | ModulusMismatch(..) | NotAUnit(_) | NotASimpleRoot
            | NotARoot(_) | DivisibleByP(_) => ErrorKind::Spec,
            PrecisionTooLow(_) | PrecisionCeiling(_) | CapExceeded(_) | SpaceTooLarge(..)
            | UnfaithfulReduction(_) => ErrorKind::Limit,
            NonIntegralRank { .. } | NotFactorable | NonIntegralCount(_) | NonIntegralResult(_) => {
                ErrorKind::Internal
            }
        }
    }

    pub fn name(&self) -> &'static str {
        use Error::*;
        match self {
            NotPrime(_) => "NotPrime",
            InvalidModulus(_) => "InvalidModulus",
            NotAUnit(_) => "NotAUnit",
            NotASimpleRoot => "NotASimpleRoot",
            NotARoot(_) => "NotARoot",
            DivisibleByP(_) => "DivisibleByP",
            OrderUnavailable { .. } => "OrderUnavailable",
            DimensionMismatch(..) => "DimensionMismatch",
            ModulusMismatch(..) => "ModulusMismatch",
            PrecisionTooLow(_) => "PrecisionTooLow",
            PrecisionCeiling(_) => "PrecisionCeiling",
            NonIntegralRank { .. } => "NonIntegralRank",
            CapExceeded(_) => "CapExceeded",
            UnfaithfulReduction(_) => "UnfaithfulReduction",
            SpecInvalid(_) => "SpecInvalid",
            NotFactorable => "NotFactorable",
            NonIntegralCount(_) => "NonIntegralCount",
            NonIntegralResult(_) => "NonIntegralResult",
            SpaceTooLarge(..) => "SpaceTooLarge",
            Parse(_) => "Parse",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Spec,
    Limit,
    Internal,
}

pub type Result<T> = std::result::Result<T, Error>;
