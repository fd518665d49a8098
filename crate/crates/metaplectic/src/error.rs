use thiserror::Error;

/// Every failure mode of the library. The `Display` text is the stable error
/// tag printed by the command line tool.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("odd prime required")]
    OddPrimeRequired,
    #[error("field too large")]
    FieldTooLarge,
    #[error("field mismatch")]
    FieldMismatch,
    #[error("zero inverse")]
    ZeroInverse,
    #[error("not a unit")]
    NotAUnit,
    #[error("not invertible")]
    NotInvertible,
    #[error("not a one-unit")]
    NotOneUnit,
    #[error("root not unique")]
    RootNotUnique,
    #[error("nonzero required")]
    NonzeroRequired,
    #[error("not in K")]
    NotInK,
    #[error("insufficient precision")]
    InsufficientPrecision,
    #[error("not etale")]
    NotEtale,
    #[error("finite-dimensional, dual vanishes")]
    FiniteDimensional,
    #[error("inconsistent Gamma data")]
    InconsistentGammaData,
    #[error("not phi-gamma compatible")]
    NotPhiGammaCompatible,
    #[error("excluded parameter")]
    ExcludedParameter,
    #[error("window too small")]
    WindowTooSmall,
    #[error("incomparable")]
    Incomparable,
    #[error("exponent range")]
    ExponentRange,
    #[error("odd required")]
    OddRequired,
    #[error("reducible for even exponent")]
    ReducibleForEvenExponent,
    #[error("not twist-invariant-irreducible")]
    NotTwistInvariantIrreducible,
    #[error("lambda not a norm in field")]
    LambdaNotANorm,
    #[error("undecidable at this rank")]
    UndecidableAtThisRank,
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
