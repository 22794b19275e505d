use std::path::PathBuf;

/// Errors surfaced by the library.
#[derive(Debug, thiserror::Error)]
pub enum ScgdError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("sample index {index} out of range for dataset of size {len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("smoothing step h must be positive and finite, got {0}")]
    InvalidSmoothing(f64),

    #[error("weights are off the probability simplex (sum = {sum:.17})")]
    WeightsOffSimplex { sum: f64 },

    #[error("negative weight {value} at coordinate {index}")]
    NegativeWeight { index: usize, value: f64 },

    #[error("sampled coordinate {index} has zero weight; importance reweighting undefined")]
    ZeroSampledWeight { index: usize },

    #[error("mixture coefficient λ must lie in [0, 1], got {0}")]
    LambdaOutOfRange(f64),

    #[error("oracle did not converge: |∇f|∞ = {grad_norm:.3e} after {iters} iterations")]
    OracleDidNotConverge { iters: u64, grad_norm: f64 },

    #[error("normal equations are singular; set μ > 0 or provide a full-rank design")]
    SingularSystem,

    #[error("objective became non-finite at step {step}")]
    NonFiniteObjective { step: u64 },

    #[error("run diverged at step {step}: f = {value:.3e} exceeds {factor:.0e} × initial {initial:.3e}")]
    Diverged { step: u64, value: f64, initial: f64, factor: f64 },

    #[error("noise constants are positive but ℒ = 0; the bound divides by ℒ")]
    ZeroGrowthConstant,

    #[error("cannot verify conditions for this schedule: {0}")]
    CannotVerify(String),

    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },

    #[error("{path}:{line}: {msg}")]
    Parse { path: PathBuf, line: usize, msg: String },

    #[error("unknown profile '{0}'; known profiles: ridge-zo, logistic-zo, ridge-fo, logistic-fo, toy-2d, sweep-np")]
    UnknownProfile(String),
}

impl ScgdError {
    /// Tag an I/O error with the path it occurred on.
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        ScgdError::Io { path: path.into(), source }
    }

    /// Tag a parse error with its file location.
    pub fn parse(path: impl Into<PathBuf>, line: usize, msg: impl Into<String>) -> Self {
        ScgdError::Parse { path: path.into(), line, msg: msg.into() }
    }
}
