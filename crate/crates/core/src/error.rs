use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("grid point count {0} is not a power of two >= 2")]
    GridSize(usize),

    #[error("degenerate interval [{min}, {max}]")]
    DegenerateInterval { min: f64, max: f64 },

    #[error("packet width exponent must be positive, got {0}")]
    PacketWidth(f64),

    #[error("packet leaks off the grid: boundary amplitude {0:e}")]
    Leakage(f64),

    #[error("time step must be positive and finite, got {0}")]
    NonPositiveStep(f64),

    #[error("time step {dt} too large: phase increment {phase:.3} rad per step exceeds {limit:.3}")]
    StepSize { dt: f64, phase: f64, limit: f64 },

    #[error("expected {expected} values, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("states live on different grids")]
    GridMismatch,

    #[error("distribution has zero total probability")]
    ZeroTotal,

    #[error("time grid must be strictly increasing with at least two points")]
    BadTimeGrid,

    #[error("kappa list is empty")]
    EmptyKappaList,

    #[error("invalid detector: {0}")]
    InvalidDetector(String),

    #[error("evolution record was produced with a different detector")]
    DetectorMismatch,

    #[error("cannot build a density matrix from the zero vector")]
    ZeroVector,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is not Hermitian (deviation {0:e})")]
    NotHermitian(f64),

    #[error("grid with {n} points exceeds the kernel limit of {max}")]
    GridTooLarge { n: usize, max: usize },

    #[error("metric is not positive definite at sample {0}")]
    NotPositiveDefinite(usize),

    #[error("metric is not symmetric at sample {0}")]
    NotSymmetric(usize),

    #[error("axis {axis} has {points} points; at least {required} are needed")]
    AxisTooShort { axis: usize, points: usize, required: usize },
}
