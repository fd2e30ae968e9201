use thiserror::Error;

/// Errors raised by the computations in this crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("group order exceeds the configured bound {bound}")]
    GroupTooLarge { bound: usize },
    #[error("invalid root datum: {0}")]
    InvalidDatum(String),
    #[error("invalid Frobenius action: {0}")]
    InvalidFrobenius(String),
    #[error("invalid torus character: {0}")]
    InvalidCharacter(String),
    #[error("{0} is not a prime power")]
    BadPrimePower(u64),
    #[error("datum is not semisimple; the length-zero group is infinite")]
    NotSemisimple,
    #[error("alcove reduction did not terminate")]
    NoConvergence,
    #[error("semidirect decomposition failed: {0}")]
    DecompositionFailure(String),
    #[error("class map is not injective: {0}")]
    NonInjective(String),
    #[error("structure constants are not rational: {0}")]
    NonRationalStructureConstants(String),
    #[error("no admissible q-parameter: {0}")]
    NoAdmissibleRoot(String),
    #[error("cocycles live over different groups or coefficients")]
    MismatchedBase,
    #[error("elements belong to different algebras")]
    AlgebraMismatch,
    #[error("rank-one kind not recognised: {0}")]
    UnrecognizedRankOneKind(String),
    #[error("finite oracle group too large (bound {bound})")]
    OracleTooLarge { bound: usize },
    #[error("{value} is not an exact power of {base}")]
    NotAPower { value: String, base: u64 },
    #[error("center lattice has infinite index: {0}")]
    InfiniteIndexCenter(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("internal invariant violated: {0}")]
    InvariantViolation(String),
}

pub type Result<T> = std::result::Result<T, Error>;
