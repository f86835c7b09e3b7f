use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("{0} is not an odd prime")]
    NotOddPrime(u64),
    #[error("valuation of zero is infinite")]
    InfiniteValuation,
    #[error("argument must be nonzero")]
    ZeroArgument,
    #[error("integer overflow beyond 127-bit magnitude")]
    Overflow,
    #[error("cannot factor {n}: cofactor has no divisor below the trial-division cap {cap}")]
    FactorizationCap { n: i128, cap: u64 },

    #[error("degenerate form: determinant is zero")]
    DegenerateForm,
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("form is not diagonal")]
    NotDiagonal,
    #[error("characteristic 2 is not supported")]
    Characteristic2,
    #[error("singular reduction: {p} divides 2·det")]
    SingularReduction { p: u64 },
    #[error("zero tuple is not a point of the cone")]
    ZeroTuple,
    #[error("coordinates are not coprime")]
    NotCoprime,
    #[error("point does not lie on the quadric")]
    NotOnQuadric,
    #[error("tuple is not primitive mod {p}")]
    NotPrimitive { p: u64 },
    #[error("singular point")]
    SingularPoint,
    #[error("precision {p}^{k} exceeds the supported modulus size")]
    PrecisionTooLarge { p: u64, k: u32 },

    #[error("discriminant is a square: no obstruction class exists")]
    TrivialClass,
    #[error("insufficient precision: the tangent form is not determined to within two digits of {p}^{k}")]
    InsufficientPrecision { p: u64, k: u32 },
    #[error("no alternative base point available in the pool")]
    NoAlternativeBasePoint,
    #[error("p-adic point at {point} cannot be evaluated at place {place}")]
    PlaceMismatch { point: u64, place: String },
    #[error("no integral point found up to height {0}")]
    NoBasePoint(i128),
    #[error("height bound must be at least 1")]
    InvalidHeight,

    #[error("invalid configuration: {0}")]
    Config(String),
}
