use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    // field construction and arithmetic
    #[error("characteristic {0} is even; only odd characteristic is supported")]
    EvenCharacteristic(u32),
    #[error("{0} is not a prime")]
    NotPrime(u32),
    #[error("extension degree must be at least 1, got {0}")]
    InvalidDegree(u32),
    #[error("field order {0} exceeds the supported maximum of 65536")]
    FieldTooLarge(u64),
    #[error("invalid modulus: {0}")]
    InvalidModulus(String),
    #[error("modulus {0:?} is reducible")]
    ReducibleModulus(Vec<u32>),
    #[error("value {value} is not an element of F_{q}")]
    ForeignElement { value: u32, q: u32 },
    #[error("division by zero")]
    DivisionByZero,
    #[error("zero has no square class")]
    ZeroInput,
    #[error("element {0} is not a square")]
    NotASquare(u32),
    #[error("Frobenius index {j} out of range for extension degree {e}")]
    FrobeniusOutOfRange { j: u32, e: u32 },

    // matrices
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("matrix is singular")]
    Singular,
    #[error("matrix is not symmetric")]
    NotSymmetric,

    // orthogonal spaces
    #[error("invalid space: {0}")]
    InvalidSpace(String),
    #[error("rows span the zero subspace")]
    ZeroSubspace,
    #[error("rows span the whole space, which is not a vertex")]
    FullSpace,
    #[error("dimension {m} out of range 1..={max}")]
    DimensionOutOfRange { m: usize, max: usize },
    #[error("operands live in different orthogonal spaces")]
    SpaceMismatch,
    #[error("Gram matrix is singular")]
    SingularGram,
    #[error("instance too large: {0}")]
    InstanceTooLarge(String),
    #[error("budget exceeded: {count} items requested, budget is {budget}")]
    BudgetExceeded { count: u128, budget: u128 },

    // graph and symmetry
    #[error("vertex index {0} out of range")]
    BadVertex(usize),
    #[error("vertices {0} and {1} lie in different components")]
    Disconnected(usize, usize),
    #[error("matrix is not orthogonal with respect to the form")]
    NotOrthogonal,
    #[error("vector is isotropic")]
    IsotropicVector,
    #[error("invalid semilinear generator: {0}")]
    InvalidSemilinear(String),
    #[error("map is not a graph automorphism")]
    NotAutomorphism,
    #[error("permutation length {got} does not match vertex count {expected}")]
    LengthMismatch { got: usize, expected: usize },
    #[error("no closed-form order for {0}")]
    Uncovered(String),
    #[error("integer overflow while evaluating {0}")]
    Overflow(&'static str),

    // io and parsing
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
