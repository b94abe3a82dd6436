use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("vertex {vertex} out of range for size {size}")]
    VertexOutOfRange { vertex: usize, size: usize },
    #[error("instance of size {size} exceeds search cap {cap}")]
    SizeExceedsCap { size: usize, cap: usize },
    #[error("set is not transitive: 3-cycle {0:?}")]
    NotTransitive([usize; 3]),
    #[error("stage {stage} out of range for horizon {horizon}")]
    StageOutOfRange { stage: usize, horizon: usize },
    #[error("color {color} at pair ({x},{y}) exceeds palette {palette}")]
    ColorOutOfPalette {
        x: usize,
        y: usize,
        color: u32,
        palette: u32,
    },
    #[error("palette must be {expected}, found {found}")]
    PaletteMismatch { expected: u32, found: u32 },
    #[error("malformed approximation: {0}")]
    MalformedApprox(String),
    #[error("flip budget exceeded at point {point}: {flips} > {budget}")]
    FlipBudget {
        point: usize,
        flips: usize,
        budget: usize,
    },
    #[error("malformed enumeration: {0}")]
    MalformedEnumeration(String),
    #[error("inconsistent functional table {table} on input {input}: {detail}")]
    InconsistentTable {
        table: usize,
        input: usize,
        detail: String,
    },
    #[error("use {use_len} below input {input} in table {table}")]
    UseBelowInput {
        table: usize,
        input: usize,
        use_len: usize,
    },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("malformed trace: {0}")]
    MalformedTrace(String),
    #[error("invalid condition: {0}")]
    InvalidCondition(String),
    #[error("reservoir not above core: core max {core_max}, reservoir min {reservoir_min}")]
    ReservoirNotAboveCore {
        core_max: usize,
        reservoir_min: usize,
    },
    #[error("empty reservoir")]
    EmptyReservoir,
    #[error("reservoir exhausted: best class has {best} elements, need {needed}")]
    ReservoirExhausted { best: usize, needed: usize },
    #[error("{0} tournaments registered but only {1} supplied")]
    TooFewTournaments(usize, usize),
    #[error("coloring is not {bound}-bounded: color {color} used {count} times")]
    NotBounded {
        bound: usize,
        color: u32,
        count: usize,
    },
    #[error("unsupported arity {0}")]
    UnsupportedArity(usize),
    #[error("coloring is not normal: {0:?} and {1:?} share a color")]
    NotNormal(Vec<usize>, Vec<usize>),
    #[error("collision pair ({sigma:?},{tau:?}) not settled on the tail")]
    NotSettled { sigma: [usize; 2], tau: [usize; 2] },
    #[error("family of {0} members exceeds limit {1}")]
    FamilyTooLarge(usize, usize),
    #[error("scenario error at {location}: {message}")]
    Scenario { location: String, message: String },
    #[error("trace line {line}: {message}")]
    CorruptTrace { line: usize, message: String },
    #[error("trace truncated: stage {0} missing")]
    TruncatedTrace(usize),
    #[error("engine mismatch: expected {expected}, found {found}")]
    EngineMismatch { expected: String, found: String },
    #[error("io error on {path}: {message}")]
    Io { path: String, message: String },
}
