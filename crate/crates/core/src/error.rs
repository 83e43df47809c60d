use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("duplicate relation name `{0}`")]
    DuplicateRelation(String),
    #[error("relation `{0}` must have arity at least 1")]
    ZeroArity(String),
    #[error("unknown relation `{0}`")]
    UnknownRelation(String),
    #[error("tuple {tuple:?} of relation `{relation}` has length {got}, expected arity {arity}")]
    ArityMismatch {
        relation: String,
        tuple: Vec<usize>,
        got: usize,
        arity: usize,
    },
    #[error("element {element} is outside the universe of size {size}")]
    OutOfRange { element: usize, size: usize },
    #[error("element {0} repeated in tuple")]
    RepeatedPoint(usize),
    #[error("relation `{relation}` is declared symmetric but contains {tuple:?} without its reverse")]
    SymmetryViolation { relation: String, tuple: Vec<usize> },
    #[error("relation `{relation}` is declared irreflexive but contains {tuple:?}")]
    ReflexiveTuple { relation: String, tuple: Vec<usize> },
    #[error("sort labels cover {got} elements, universe has {size}")]
    SortLength { got: usize, size: usize },
    #[error("structure is not a member of class {class}: {reason}")]
    NotInClass { class: String, reason: String },
    #[error("unsupported class for this operation: {0}")]
    UnsupportedClass(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("saturation {target} infeasible at cap {cap} (reached size {reached})")]
    SaturationInfeasible {
        target: usize,
        cap: usize,
        reached: usize,
    },
    #[error("resource bound exceeded: {0}")]
    Resource(String),
    #[error("2-type is not realized in the structure")]
    TauNotRealized,
    #[error("invalid atom specification: {0}")]
    InvalidAtomSpec(String),
    #[error("{value} is not an atom of the latent law")]
    NotAnAtom { value: f64 },
    #[error("rejection sampler exceeded {tries} tries after {accepted} acceptances (observed acceptance rate {rate:.3e})")]
    RejectionExhausted {
        tries: u64,
        accepted: u64,
        rate: f64,
    },
    #[error("tuples {left:?} and {right:?} have different types")]
    TypeMismatch { left: Vec<usize>, right: Vec<usize> },
    #[error("sampler does not expose an eta statistic")]
    MissingEta,
    #[error("malformed input at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("json: {0}")]
    Json(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}
