use thiserror::Error;

/// Failures while reading an edge-list or CSP document.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("missing or malformed header")]
    Header,
    #[error("line {line}: malformed entry")]
    Malformed { line: usize },
    #[error("line {line}: vertex id {id} out of range")]
    OutOfRange { line: usize, id: usize },
    #[error("line {line}: duplicate edge ({u}, {v})")]
    Duplicate { line: usize, u: usize, v: usize },
    #[error("line {line}: self-loop at vertex {v}")]
    SelfLoop { line: usize, v: usize },
    #[error("expected {expected} entries, found {found}")]
    Count { expected: usize, found: usize },
    #[error("line {line}: value {value} outside the alphabet")]
    Value { line: usize, value: usize },
    #[error("line {line}: second constraint on pair ({x}, {y})")]
    DuplicateConstraint { line: usize, x: usize, y: usize },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("vertex {0} is not in the graph")]
    InvalidVertex(usize),
    #[error("invalid edge ({0}, {1})")]
    InvalidEdge(usize, usize),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("{what}: search space {size} exceeds ceiling {ceiling}")]
    CeilingExceeded { what: &'static str, size: f64, ceiling: f64 },
    #[error("oracle failure: {0}")]
    Oracle(String),
    #[error("separation oracle returned a constraint that is not violated")]
    OracleBug,
    #[error("numeric failure: {0}")]
    Numeric(String),
    #[error("no prime in [{lo}, {hi}]")]
    NoPrime { lo: u64, hi: u64 },
    #[error("inflated edge has {0} origins")]
    AmbiguousOrigin(usize),
    #[error("bad event persisted after {0} resamples")]
    BadEvent(usize),
    #[error("profile inequality failed: {0}")]
    ProfileInequality(String),
    #[error("no balanced cut exists")]
    NoBalancedCut,
    #[error("every budget was infeasible")]
    Degenerate,
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("good certificate short: best {best}, needed {needed}")]
    CertificateShortfall { best: usize, needed: usize },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
