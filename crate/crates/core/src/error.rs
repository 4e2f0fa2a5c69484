use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("truncation degree mismatch: {left} vs {right}")]
    DegreeMismatch { left: u32, right: u32 },
    #[error("exponential of a series with nonzero constant term")]
    NonzeroConstantTerm,
    #[error("monomial {monomial} exceeds truncation degree {degree}")]
    DegreeOutOfRange { monomial: String, degree: u32 },
    #[error("expansion template only covers degree <= {max}, requested {requested}")]
    TemplateDegree { requested: u32, max: u32 },
    #[error("gamma factors leave an unbalanced sqrt(pi) (net Gamma(1/2+.) count {0})")]
    UnbalancedHalfGamma(i32),
    #[error("gamma factor argument has a nonzero constant term")]
    ShiftedArgument,
    #[error("constant {0} is not supported here")]
    UnsupportedSymbol(String),
    #[error("precision {0} bits is below the supported minimum of 64")]
    Precision(u32),
    #[error("convergence condition violated: {0}")]
    Convergence(String),
    #[error("division by zero in factor at k = {0}")]
    ZeroFactor(u64),
    #[error("internal inconsistency at monomial {monomial}: {detail}")]
    Inconsistent { monomial: String, detail: String },
    #[error("mixed weight families in combination: {0} and {1}")]
    MixedWeights(String, String),
    #[error("combination has zero left side but nonzero right side")]
    ZeroLhsNonzeroRhs,
    #[error("combination needs at least one parent")]
    EmptyCombination,
    #[error("right side contains Euler's gamma")]
    GammaInRhs,
    #[error("tolerance {tolerance:e} is finer than working precision of {bits} bits allows")]
    Tolerance { tolerance: f64, bits: u32 },
    #[error("tail estimate is only available for the central-binomial family, got {0}")]
    UnsupportedWeight(String),
    #[error("tail estimate needs at least {min} terms, got {got}")]
    TailCutoff { got: u64, min: u64 },
    #[error("unknown theorem {0:?}")]
    UnknownTheorem(String),
    #[error("unknown identity id {0:?}")]
    UnknownIdentity(String),
    #[error("duplicate identity id {0:?}")]
    DuplicateIdentity(String),
    #[error("malformed input: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
