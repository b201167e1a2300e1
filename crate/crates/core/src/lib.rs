//! Certified computation of (omega, c)-periodic solutions — functions with
//! y(t + omega) = c y(t) — for semilinear problems y' = Ay + g(t, y).
//!
//! The crate has two layers:
//!
//! * **Certificates**: rigorous-in-exact-arithmetic existence and
//!   uniqueness tests built from operator-norm constants of the boundary
//!   Green kernel ([`kernels`], [`certificates`]), for matrix problems and
//!   for diagonal semigroup generators ([`spectral`]).
//! * **Solvers**: a collocation Picard iteration and an independent
//!   shooting method for matrix problems ([`ode`]), and a per-mode kernel
//!   solver for field problems ([`spectral::solve`]).
//!
//! Everything is deterministic: fixed quadrature orders, fixed reduction
//! orders, and seeded sampling in the diagnostics.

pub mod certificates;
pub mod error;
pub mod interp;
pub mod kernels;
pub mod linalg;
pub mod nonlin;
pub mod ode;
pub mod quad;
pub mod spectral;

pub use certificates::{
    certify_contraction, certify_growth, certify_mild_contraction, certify_mild_growth,
    Certificate, CertificateKind, GronwallBound, OperatorNormRoute, SemigroupConstants, Verdict,
};
pub use error::{Error, Result};
pub use kernels::{GreenKernelODE, OperatorNormEstimate, PeriodicitySpec, QuadratureSpec};
pub use linalg::{
    induced_norm, matrix_exponential, nonresonance_resolvent, spectrum, vector_norm,
    ComplexMatrix, NormKind, DEFAULT_MARGIN_TOL,
};
pub use nonlin::{
    heat_cubic, heat_cubic_derivative_max, heat_cubic_pointwise, periodicity_residual,
    planar_abs_forced, planar_trig, schrodinger_cubic, schrodinger_cubic_derivative_max,
    schrodinger_cubic_pointwise, NonlinearitySpec, PointwiseNonlinearity, StateNorm,
};
pub use ode::poincare::poincare_solve;
pub use ode::{extend_solution, picard_solve, residual_report, Residuals, SolutionTrajectory};
pub use spectral::solve::{
    exponential_propagate, mild_extend, mild_picard_solve, spatial_points, MildTrajectory,
};
pub use spectral::{
    grid_transform, grid_transform_inverse, mode_kernel, resolvent_norm, semigroup_apply,
    BasisKind, DiagonalGenerator, FieldState, TransformPlan,
};
