use thiserror::Error;

/// Every failure the library can report.
///
/// Variants are grouped by the layer that raises them; higher layers
/// propagate lower-layer errors unchanged.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    // scalars
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("working precision {0} is below the minimum of {1} digits")]
    PrecisionTooSmall(u32, u32),
    #[error("division by zero")]
    DivisionByZero,
    #[error("precision exhausted: only {remaining} trusted digits left in {context}")]
    PrecisionExhausted { remaining: i64, context: &'static str },
    #[error("operation requires a nonzero argument")]
    ZeroInput,
    #[error("values live over different primes ({0} vs {1})")]
    PrimeMismatch(u64, u64),

    // linear algebra
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("matrix is singular at working precision")]
    Singular,

    // quadratic spaces
    #[error("quadratic form is degenerate")]
    DegenerateForm,
    #[error("isotropic vector search exhausted after modulus p^{0}")]
    SearchExhausted(u32),
    #[error("space is anisotropic")]
    Anisotropic,
    #[error("value is not represented by the form")]
    NotRepresented,
    #[error("form restricted to the span is degenerate")]
    DegenerateRestriction,

    // orthogonal group
    #[error("matrix does not preserve the form")]
    NotIsometry,
    #[error("reflection vector is null")]
    NullReflectionVector,
    #[error("vectors lie in different orbits")]
    DifferentOrbits,
    #[error("spaces are not isometric")]
    NotIsometric,
    #[error("operation requires dimension at least {0}")]
    DimensionTooSmall(usize),

    // embeddings and spin cover
    #[error("element does not fix the null vector p")]
    NotInStabilizer,
    #[error("no preimage under the spin cover (square-class obstruction)")]
    NoPreimage,
    #[error("matrix does not have the shape of a spin-cover image")]
    NotInImageShape,
    #[error("determinant is not 1")]
    NotSpecialLinear,

    // conformal space
    #[error("point lies outside the affine chart")]
    NotInChart,
    #[error("point is not on the null cone")]
    NotOnCone,
    #[error("vector is not tangent at the base point")]
    NotTangent,
    #[error("no escaping chart point found within the search bound")]
    WitnessSearchExhausted,

    // Galilean group
    #[error("tau must be nonzero")]
    ZeroTau,
    #[error("xi must be nonzero")]
    ZeroXi,
    #[error("base multiplier fails the cocycle identity")]
    InvalidBaseMultiplier,
    #[error("Galilean construction needs an isotropic V_0")]
    AnisotropicSpatialSpace,

    // orbit analysis
    #[error("vector is not massive")]
    NotMassive,
    #[error("vector is not a nonzero null vector")]
    NotNull,

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
