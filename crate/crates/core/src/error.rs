use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension must be at least 2, got {0}")]
    InvalidDim(usize),

    #[error("expected {expected} coordinates, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("invalid exponent: {0}")]
    InvalidExponent(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("finite-difference determinants disagree: {coarse} vs {fine}")]
    NonSmooth { coarse: f64, fine: f64 },

    #[error("degenerate sample: closed-form Jacobian vanished on {attempts} consecutive draws")]
    DegenerateSample { attempts: usize },

    #[error("support first-coordinate projection [{lo}, {hi}] exceeds integration window [{win_lo}, {win_hi}]")]
    WindowTooSmall {
        lo: f64,
        hi: f64,
        win_lo: f64,
        win_hi: f64,
    },

    #[error("truncation tail {tail:e} exceeds tolerance {tol:e}")]
    TruncationTail { tail: f64, tol: f64 },

    #[error("bilinear form vanishes; ratios are undefined")]
    ZeroBilinear,

    #[error("level-bound hypothesis fails: transform reaches {min_value} < delta = {delta} on the sample grid")]
    HypothesisFailed { min_value: f64, delta: f64 },

    #[error("refinement left no tuples")]
    EmptyRefinement,

    #[error("tower collapse at level {0}")]
    TowerCollapse(usize),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
