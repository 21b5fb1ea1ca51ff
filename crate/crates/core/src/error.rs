use thiserror::Error;

/// Errors surfaced by the exact-arithmetic layers.
///
/// Every variant corresponds to a contract violation that callers can hit
/// with well-formed but out-of-domain inputs; internal arithmetic bugs are
/// reported through `InexactDivision` and `NonIntegralCoefficient`, which
/// are never expected on valid data.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("field too large: q = p^e must not exceed {0}")]
    FieldTooLarge(u64),
    #[error("{0} is not prime")]
    NotAPrimeChar(u64),
    #[error("too many variables: s = {0} exceeds the supported bound 16")]
    TooManyVariables(usize),
    #[error("variable degree overflow (exponent >= 256)")]
    DegreeOverflow,
    #[error("polynomial is not irreducible")]
    NotIrreducible,
    #[error("parameter alpha must be nonzero")]
    ZeroParameter,
    #[error("grade mismatch: {0} vs {1}")]
    GradeMismatch(u32, u32),
    #[error("element is not a unit: leading coefficient must be a nonzero field scalar")]
    NotAUnit,
    #[error("element is not a 1-unit")]
    NotOneUnit,
    #[error("root order is divisible by the characteristic")]
    RootOrderDivisibleByP,
    #[error("insufficient precision: have {have}, need {need}")]
    InsufficientPrecision { have: i64, need: i64 },
    #[error("argument outside the logarithm's disk of convergence")]
    OutsideLogDomain,
    #[error("module is not uniformizable: alpha is not a unit of the Tate algebra")]
    NotUniformizable,
    #[error("no (q-1)-th root of the normalization scalar in the coefficient field")]
    RootNotInField,
    #[error("degree-block sum did not stabilize within the degree cap {0}")]
    NoStabilization(i64),
    #[error("not the torsion case: need -alpha monic of theta-degree = 1 mod (q-1)")]
    NotTorsionCase,
    #[error("series tail does not vanish: first nonzero exponent {0}")]
    TailNotVanishing(i64),
    #[error("polynomial is not prime")]
    NotPrime,
    #[error("inexact division (arithmetic invariant violated)")]
    InexactDivision,
    #[error("arity mismatch: expected {expected} variables, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("exponent {i} is not congruent to the type {s} mod (q-1)")]
    GradeResidue { i: i64, s: i64 },
    #[error("rational reconstruction failed within the degree cap")]
    ReconstructionFailed,
    #[error("value is not P-integral")]
    NotPIntegral,
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("quotient too shallow: depth {m} below the nucleus floor {floor}")]
    QuotientTooShallow { m: i64, floor: i64 },
    #[error("non-integral coefficient at monomial {0} (integrality invariant violated)")]
    NonIntegralCoefficient(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
