use thiserror::Error;

/// Errors produced by the solver.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("x^{0} matrix elements are not implemented (supported powers: 1, 2, 4)")]
    UnsupportedPower(u32),

    #[error("levels {i} and {k} are coupled but only {gap:e} apart (gap floor {floor:e})")]
    NearDegeneracy {
        i: usize,
        k: usize,
        gap: f64,
        floor: f64,
    },

    #[error("integration exceeded {max_steps} steps before reaching g = {target}")]
    StepLimitExceeded { max_steps: usize, target: f64 },

    #[error("step size {step:e} underflowed at g = {g}")]
    StepUnderflow { step: f64, g: f64 },

    #[error("non-finite value in the flow right-hand side at g = {g}")]
    NonFinite { g: f64 },

    #[error("double-well chaining requires the AHO state at g = 0.5, got g = {0}")]
    ChainMismatch(f64),

    #[error("Jacobi diagonalization did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:e})")]
    NoConvergence { sweeps: usize, off_norm: f64 },

    #[error("ramp rate must be nonzero")]
    ZeroRampRate,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
