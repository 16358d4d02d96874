use thiserror::Error;

/// Everything that can go wrong between reading a config and writing a report.
#[derive(Debug, Error)]
pub enum Error {
    #[error("n_wells must be odd and at least 3 so the chain has a unique middle well, got {0}")]
    EvenWellCount(usize),
    #[error("{field} must be positive, got {value}")]
    NonPositiveStep { field: &'static str, value: f64 },
    #[error("{field} must be finite and non-negative, got {value}")]
    NegativeRate { field: &'static str, value: f64 },
    #[error("{field} must be at least 1")]
    ZeroCount { field: &'static str },
    #[error("trajectory {traj} became non-finite at t = {t}")]
    NumericalBlowup { traj: u64, t: f64 },
    #[error("state at t = {found} cannot be accumulated into moments for t = {expected}")]
    TimeMismatch { expected: f64, found: f64 },
    #[error("accumulators hold moments for different chains or times")]
    IncompatibleAccumulators,
    #[error("no trajectories have been accumulated")]
    EmptyAccumulator,
    #[error("pair ({0}, {0}) is diagonal; use the population instead")]
    DiagonalPair(usize),
    #[error("total population {0} is not positive; density matrix is undefined")]
    NonPositiveNorm(f64),
    #[error("eigenvalue {value} is below the statistical floor {floor}; moments are corrupted")]
    SignificantNegativeEigenvalue { value: f64, floor: f64 },
    #[error("the linear reference requires chi = 0, got {0}")]
    NonzeroChi(f64),
    #[error("invalid config: {0}")]
    Parse(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit status used by the command-line runner.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::NumericalBlowup { .. } => 3,
            Error::Io(_) => 4,
            _ => 2,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
