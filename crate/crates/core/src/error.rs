use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("S-pair budget of {budget} exceeded")]
    BudgetExceeded { budget: usize },
    #[error("basis is not triangular: {0}")]
    NotTriangular(String),
    #[error("system is not zero-dimensional: {0}")]
    NotZeroDimensional(String),
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("duplicate variable `{0}`")]
    DuplicateVariable(String),
    #[error("variable `{name}` must have at least 2 levels, got {levels}")]
    TooFewLevels { name: String, levels: usize },
    #[error("empty generator")]
    EmptyGenerator,
    #[error("duplicate generator {0:?}")]
    DuplicateGenerator(Vec<String>),
    #[error("invalid edge: {0}")]
    InvalidEdge(String),
    #[error("column sums differ: column 0 sums to {first}, column {column} sums to {found}")]
    ColumnSumsDiffer { first: i64, column: usize, found: i64 },
    #[error("negative entry {value} at ({row}, {column})")]
    NegativeEntry { row: usize, column: usize, value: i64 },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("negative value at index {0}")]
    NegativeValue(usize),
    #[error("binomial does not satisfy A*u = A*v: {0}")]
    NotInKernel(String),
    #[error("vertex cap of {cap} exceeded ({found} vertices)")]
    VertexCapExceeded { cap: usize, found: usize },
    #[error("graph is chordal")]
    ChordalGraph,
    #[error("invalid nondecomposable partition: {0}")]
    InvalidPartition(String),
    #[error("parameter out of range: {0}")]
    OutOfRange(String),
    #[error("distribution is not in the toric variety")]
    NotInVariety,
    #[error("least-squares residual {0:e} above threshold")]
    LogSystemResidual(f64),
    #[error("no convergence after {cycles} cycles (max marginal error {error:e})")]
    NonConvergence { cycles: usize, error: f64 },
    #[error("count table must have a positive total")]
    EmptyCounts,
    #[error("all cells dropped by zero-marginal reduction")]
    AllCellsDropped,
    #[error("iterative scaling needs a 0/1 model matrix")]
    NonBinaryMatrix,
    #[error("{0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
