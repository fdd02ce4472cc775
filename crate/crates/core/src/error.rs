use thiserror::Error;

/// Errors raised by the scalar and polynomial layer.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("{0} is not a supported prime modulus")]
    NotPrime(u64),
    #[error("syntax error at position {pos}: {message}")]
    Syntax { pos: usize, message: String },
    #[error("unknown variable `{name}` at position {pos}")]
    UnknownVariable { name: String, pos: usize },
    #[error("duplicate variable name `{0}`")]
    DuplicateVariable(String),
    #[error("a polynomial ring needs at least one coordinate")]
    NoCoordinates,
    #[error("operands live in different polynomial rings")]
    RingMismatch,
    #[error("degree {degree} exceeds the configured bound {bound}")]
    DegreeBound { degree: u64, bound: u32 },
    #[error("variable index {index} out of range for {nvars} variables")]
    IndexOutOfRange { index: usize, nvars: usize },
}

/// Errors raised by the operator, module and invariant layers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("the ring already carries a Rees variable")]
    ReesPresent,
    #[error("the ring has no Rees variable")]
    ReesMissing,
    #[error("operands belong to different algebroids")]
    AlgebroidMismatch,
    #[error("expected an element of filtration degree at most 1, found degree {0}")]
    NotFirstOrder(usize),
    #[error("normal form grew to {terms} terms, above the limit {limit}")]
    TermLimit { terms: usize, limit: usize },
    #[error("p-structure shift rejected for generator {generator}: {reason}")]
    ShiftRejected { generator: usize, reason: String },
    #[error("element is not central: {0}")]
    NotCentral(String),
    #[error("module is not flat: {0}")]
    NotFlat(String),
    #[error("p-curvature of generator {generator} has a differential part: {witness}")]
    HigherOrder { generator: usize, witness: String },
    #[error("p-curvature components do not commute: {0}")]
    NotCommuting(String),
    #[error("characteristic 2 is not supported by {0}")]
    CharacteristicTwo(&'static str),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
