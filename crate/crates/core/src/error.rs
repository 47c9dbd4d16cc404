//! Crate-wide error type.
//!
//! Every fallible public operation returns [`Error`]. Each variant carries a
//! stable machine-readable code (see [`Error::code`]) used by the CLI's JSON
//! error envelope and by the C ABI's status codes, so downstream consumers can
//! match on codes instead of display strings.

use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum Error {
    /// The requested prime field characteristic is not prime.
    #[error("characteristic {0} is not prime")]
    CompositeCharacteristic(u64),

    /// The operation needs the characteristic to exceed the space dimension.
    #[error("characteristic {p} is too small for dimension {dim} (need p > dim)")]
    CharacteristicTooSmall { p: u64, dim: usize },

    /// Factorization and root finding are undefined for the zero polynomial.
    #[error("the zero polynomial cannot be factored")]
    ZeroPolynomial,

    /// A square matrix was required.
    #[error("expected a square matrix, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    /// Matrix or subspace dimensions do not line up.
    #[error("shape mismatch: {0}")]
    Shape(String),

    /// The operator must be invertible.
    #[error("operator is singular")]
    SingularOperator,

    /// The characteristic polynomial is not closed under lambda -> 1/lambda
    /// with matching multiplicities.
    #[error("polynomial is not self-dual: {0}")]
    NotSelfDual(String),

    /// The operator does not preserve the bilinear form.
    #[error("operator is not an isometry of the given form")]
    NotIsometry,

    /// The matrix is not nilpotent.
    #[error("matrix is not nilpotent")]
    NotNilpotent,

    /// The matrix does not satisfy X^T G + G X = 0.
    #[error("matrix is not in the Lie algebra of the form")]
    NotInLieAlgebra,

    /// An sl2 completion of the zero nilpotent does not exist.
    #[error("the zero matrix admits no sl2 completion")]
    ZeroNilpotent,

    /// The operator is not unipotent.
    #[error("operator is not unipotent")]
    NotUnipotent,

    /// The Gram matrix is not a supported non-degenerate form.
    #[error("invalid bilinear form: {0}")]
    InvalidForm(String),

    /// A subspace expected to be totally isotropic is not.
    #[error("subspace is not totally isotropic")]
    IsotropyViolation,

    /// The pairing between two eigenspaces is degenerate.
    #[error("pairing between the two subspaces is degenerate")]
    DegeneratePairing,

    /// The brute-force oracle refuses inputs beyond its guard rails.
    #[error("too large for the brute-force oracle: {0}")]
    TooLarge(String),

    /// A problem document failed to parse or validate.
    #[error("parse error at {path}: {reason}")]
    Parse { path: String, reason: String },

    /// An element was used at a level that is not a descendant of its own.
    #[error("target level is not an extension of the element's level")]
    LevelMismatch,

    /// Two operators that a witness construction requires to be conjugate
    /// have different elementary divisors.
    #[error("operators have different elementary divisors")]
    DivisorMismatch,

    /// An internal construction that theory guarantees did not go through.
    /// Seeing this indicates a defect, not a property of the input.
    #[error("internal construction failed: {0}")]
    Construction(String),
}

impl Error {
    /// Stable machine-readable code for this error.
    pub fn code(&self) -> &'static str {
        match self {
            Error::CompositeCharacteristic(_) => "composite-characteristic",
            Error::CharacteristicTooSmall { .. } => "characteristic-too-small",
            Error::ZeroPolynomial => "zero-polynomial",
            Error::NotSquare { .. } => "not-square",
            Error::Shape(_) => "shape-mismatch",
            Error::SingularOperator => "singular-operator",
            Error::NotSelfDual(_) => "not-self-dual",
            Error::NotIsometry => "not-isometry",
            Error::NotNilpotent => "not-nilpotent",
            Error::NotInLieAlgebra => "not-in-lie-algebra",
            Error::ZeroNilpotent => "zero-nilpotent",
            Error::NotUnipotent => "not-unipotent",
            Error::InvalidForm(_) => "invalid-form",
            Error::IsotropyViolation => "isotropy-violation",
            Error::DegeneratePairing => "degenerate-pairing",
            Error::TooLarge(_) => "too-large",
            Error::Parse { .. } => "parse-error",
            Error::LevelMismatch => "level-mismatch",
            Error::DivisorMismatch => "divisor-mismatch",
            Error::Construction(_) => "construction-failed",
        }
    }

    /// Stable numeric status for the C ABI. 0 is reserved for success.
    pub fn status(&self) -> i32 {
        match self {
            Error::CompositeCharacteristic(_) => 1,
            Error::CharacteristicTooSmall { .. } => 2,
            Error::ZeroPolynomial => 3,
            Error::NotSquare { .. } => 4,
            Error::Shape(_) => 5,
            Error::SingularOperator => 6,
            Error::NotSelfDual(_) => 7,
            Error::NotIsometry => 8,
            Error::NotNilpotent => 9,
            Error::NotInLieAlgebra => 10,
            Error::ZeroNilpotent => 11,
            Error::NotUnipotent => 12,
            Error::InvalidForm(_) => 13,
            Error::IsotropyViolation => 14,
            Error::DegeneratePairing => 15,
            Error::TooLarge(_) => 16,
            Error::Parse { .. } => 17,
            Error::LevelMismatch => 18,
            Error::Construction(_) => 19,
            Error::DivisorMismatch => 20,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
