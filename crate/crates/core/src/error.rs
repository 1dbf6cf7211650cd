use thiserror::Error;

/// Failures raised while analysing a matrix pencil.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum PencilError {
    #[error("F is {f_rows}x{f_cols} but G is {g_rows}x{g_cols}")]
    ShapeMismatch {
        f_rows: usize,
        f_cols: usize,
        g_rows: usize,
        g_cols: usize,
    },
    #[error("pencil matrices must be non-empty")]
    Empty,
    #[error("pencil entries must be finite")]
    NonFinite,
    #[error("expected {expected} matrix entries, got {got}")]
    DataLength { expected: usize, got: usize },
    #[error("pencil is {rows}x{cols}; a square pencil is required")]
    NonSquarePencil { rows: usize, cols: usize },
    #[error("numerical breakdown: {0}")]
    NumericalBreakdown(String),
    #[error("pencil is not regular")]
    IrregularPencil,
    #[error("unsupported Jordan structure: {0}")]
    UnsupportedJordanStructure(String),
}

/// Failures raised by the descriptor-system solver.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolverError {
    #[error(transparent)]
    Pencil(#[from] PencilError),
    #[error("input V_{k} is not available")]
    MissingInput { k: i64 },
    #[error("input V_{k} has length {got}, expected {expected}")]
    InputDimension { k: i64, got: usize, expected: usize },
    #[error("vector has length {got}, expected {expected}")]
    DimensionMismatch { got: usize, expected: usize },
    #[error("index {k} precedes the system start index {start}")]
    BeforeStart { k: i64, start: i64 },
    #[error("initial condition is inconsistent (residual {residual:e}, tolerance {tolerance:e})")]
    InconsistentIC { residual: f64, tolerance: f64 },
    #[error("trajectory residual {residual:e} exceeds bound {bound:e}")]
    ResidualCheck { residual: f64, bound: f64 },
}

/// Invalid model parameters or missing model data.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("multiplier a = {0} violates 0 < a < 1")]
    Multiplier(f64),
    #[error("accelerator b = {0} violates b > 0")]
    Accelerator(f64),
    #[error("non-finite value for {0}")]
    NonFinite(&'static str),
    #[error("horizon {horizon} is below the minimum {min}")]
    Horizon { horizon: i64, min: i64 },
    #[error("government expenditure G_{k} is not available")]
    InsufficientExpenditureData { k: i64 },
    #[error(transparent)]
    Solver(#[from] SolverError),
}

impl From<PencilError> for ModelError {
    fn from(e: PencilError) -> Self {
        ModelError::Solver(SolverError::Pencil(e))
    }
}
