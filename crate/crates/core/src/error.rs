use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("matrix contains a non-finite entry")]
    NonFinite,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("resonance: multiplier {multiplier} lies within {distance:.3e} of c")]
    Resonance {
        multiplier: Complex64,
        distance: f64,
    },
    #[error("linear solve broke down (matrix numerically singular)")]
    Singular,
    #[error("eigenvalue iteration failed to converge: {0}")]
    ConvergenceFailure(String),
    #[error("floating-point overflow in matrix exponential")]
    Overflow,
    #[error("required constant `{0}` was not declared")]
    MissingConstant(&'static str),
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("iteration did not converge after {iterations} steps (last update {last_update:.3e})")]
    NonConvergence { iterations: usize, last_update: f64 },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("aliasing: need at least {needed} spatial points for {modes} modes, got {got}")]
    Aliasing {
        needed: usize,
        modes: usize,
        got: usize,
    },
    #[error("step size underflow in adaptive integrator at t = {0}")]
    StepSizeUnderflow(f64),
}

pub type Result<T> = std::result::Result<T, Error>;
