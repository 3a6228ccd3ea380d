use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("characteristic {0} is not prime")]
    NonPrimeCharacteristic(u64),
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
    #[error("field of order {order} exceeds the size cap {cap}")]
    FieldTooLarge { order: u128, cap: u64 },
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("element {value} is outside a field of order {order}")]
    ElementOutOfRange { value: u64, order: u64 },
    #[error("division by zero")]
    DivisionByZero,
    #[error("operands belong to different fields")]
    FieldMismatch,
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("subspaces live in different ambient spaces ({0} vs {1})")]
    AmbientMismatch(usize, usize),
    #[error("enumeration of {0} candidates exceeds the configured cap")]
    EnumerationTooLarge(String),
    #[error("vector must be non-zero")]
    ZeroVector,
    #[error("translating element is singular")]
    SingularTranslate,
    #[error("matrix is not an element of the general linear group")]
    NonGroupElement,
    #[error("incompatible extension: {0}")]
    IncompatibleExtension(String),
    #[error("n must divide l (n = {n}, l = {l})")]
    NotDivisible { n: usize, l: usize },
    #[error("spread members {0} and {1} are not complementary")]
    NotComplementary(usize, usize),
    #[error("spread is not in normalized position")]
    NotNormalized,
    #[error("spread member {0} does not have the form (I | T)")]
    MalformedMember(usize),
    #[error("family is not a coclique")]
    NotCoclique,
    #[error("search over {vertices} vertices exceeds the cap of {cap}")]
    SearchTooLarge { vertices: usize, cap: usize },
    #[error("clique and coclique meet the product bound but share {0} elements")]
    EqualityConditionViolated(usize),
    #[error("permutation sizes differ ({0} vs {1})")]
    SizeMismatch(usize, usize),
    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),
    #[error("invalid certificate: {0}")]
    InvalidCertificate(String),
}
