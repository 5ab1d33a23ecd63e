use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("grid built for modes up to {grid_modes} cannot hold mode {requested}")]
    GridTooSmall { grid_modes: usize, requested: usize },

    #[error("basis fails quadrature orthonormality: max deviation {deviation:e}")]
    BasisNotOrthonormal { deviation: f64 },

    #[error("zero temperature has no Boltzmann weight; use the minimiser")]
    ZeroTemperature,

    #[error("a single-mode system admits no norm-preserving moves")]
    FrozenSystem,

    #[error("non-finite energy change {delta} at step {step}")]
    NonFiniteEnergy { delta: f64, step: u64 },

    #[error("empty sample stream")]
    EmptyStream,

    #[error("series too short: {len} samples, need at least {min}")]
    SeriesTooShort { len: usize, min: usize },

    #[error("matrix is not Hermitian: max asymmetry {asymmetry:e}")]
    NotHermitian { asymmetry: f64 },

    #[error("grid is not symmetric about x = 0")]
    AsymmetricGrid,

    #[error("no half-maximum crossing inside the grid; increase the extent factor")]
    NoHalfMaxCrossing,

    #[error("profile maximum sits at the grid edge")]
    MaximumAtEdge,

    #[error("mean density vanishes at grid index {index}")]
    ZeroDensity { index: usize },

    #[error("cutoff {requested} too large for brute-force integration (max {max})")]
    CutoffTooLarge { requested: usize, max: usize },

    #[error("mode cutoff evaluates to zero: no dynamics possible")]
    DegenerateCutoff,

    #[error("imaginary-time propagation did not converge in {iterations} iterations (last residual {last:e})")]
    NotConverged { iterations: usize, last: f64, history: Vec<f64> },

    #[error("energy rose by {rise:e} at iteration {iteration} of imaginary-time propagation")]
    EnergyIncrease { iteration: usize, rise: f64 },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter { name, reason: reason.into() }
    }
}
