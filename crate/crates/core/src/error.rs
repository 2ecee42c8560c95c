use thiserror::Error;

/// Errors raised by the engine. Variant names follow the error codes used in
/// reports and CLI output (see [`Error::code`]).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("p = {0} is not an odd prime")]
    NotPrime(u64),
    #[error("exponent prefix must be strictly increasing with at least two entries")]
    NotIncreasing,
    #[error("defining vector has length {found}, expected p^m1 - 1 = {expected}")]
    BadVectorLength { expected: usize, found: usize },
    #[error("defining vector is all zero")]
    VectorAllZero,
    #[error("entry e_{index} = {value} is outside [-(p^m2 - 1), p^m2 - 1]")]
    EntryOutOfRange { index: usize, value: i64 },
    #[error("degree p^{0} does not fit the residue representation")]
    DegreeTooLarge(u32),
    #[error("shift {shift} with depth {depth} exceeds the exponent prefix of length {prefix}")]
    OutOfPrefix { shift: usize, depth: usize, prefix: usize },
    #[error("portraits have different shapes")]
    ShapeMismatch,
    #[error("vertex of length {len} exceeds portrait depth {depth}")]
    DepthExceeded { len: usize, depth: usize },
    #[error("vertex index {index} at level {level} is outside 1..={degree}")]
    BadVertex { level: usize, index: u64, degree: u64 },
    #[error("word does not fix the first level (epsilon_a = {0})")]
    NotInStabiliser(u64),
    #[error("ambient bound {bound} exceeds size cap {cap}")]
    CapExceeded { bound: String, cap: u64 },
    #[error("element is not in the enumerated table")]
    NotMember,
    #[error("unknown identity id {0:?}")]
    UnknownId(String),
    #[error("defining vector is zero modulo p")]
    NotInF,
    #[error("index n = {0} does not satisfy e_n != 0 mod p")]
    BadN(usize),
    #[error("element is not in the derived subgroup (exponent maps {0})")]
    NotInDerived(String),
    #[error("defining vector violates the torsion-type condition")]
    NoTorsionCondition,
    #[error("bad input: {0}")]
    BadInput(String),
    #[error("hypothesis violated: {0}")]
    HypothesisViolation(String),
    #[error("parse error at {start}..{end}: {message}")]
    Parse { message: String, start: usize, end: usize },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("exponent prefix exhausted; partial certificate: {partial}")]
    PrefixExhausted { partial: String },
    #[error("iteration limit reached; partial certificate: {partial}")]
    MaxIterExceeded { partial: String },
}

impl Error {
    /// Stable upper-case code used in JSON reports.
    pub fn code(&self) -> &'static str {
        match self {
            Error::NotPrime(_) => "NOT_PRIME",
            Error::NotIncreasing => "NOT_INCREASING",
            Error::BadVectorLength { .. } => "BAD_VECTOR_LENGTH",
            Error::VectorAllZero => "VECTOR_ALL_ZERO",
            Error::EntryOutOfRange { .. } => "ENTRY_OUT_OF_RANGE",
            Error::DegreeTooLarge(_) => "DEGREE_TOO_LARGE",
            Error::OutOfPrefix { .. } => "OUT_OF_PREFIX",
            Error::ShapeMismatch => "SHAPE_MISMATCH",
            Error::DepthExceeded { .. } => "DEPTH_EXCEEDED",
            Error::BadVertex { .. } => "BAD_VERTEX",
            Error::NotInStabiliser(_) => "NOT_IN_STABILISER",
            Error::CapExceeded { .. } => "CAP_EXCEEDED",
            Error::NotMember => "NOT_MEMBER",
            Error::UnknownId(_) => "UNKNOWN_ID",
            Error::NotInF => "NOT_IN_F",
            Error::BadN(_) => "BAD_N",
            Error::NotInDerived(_) => "NOT_IN_DERIVED",
            Error::NoTorsionCondition => "NO_TORSION_CONDITION",
            Error::BadInput(_) => "BAD_INPUT",
            Error::HypothesisViolation(_) => "HYPOTHESIS_VIOLATION",
            Error::Parse { .. } => "PARSE_ERROR",
            Error::InvalidConfig(_) => "INVALID_CONFIG",
            Error::PrefixExhausted { .. } => "PREFIX_EXHAUSTED",
            Error::MaxIterExceeded { .. } => "MAX_ITER_EXCEEDED",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
