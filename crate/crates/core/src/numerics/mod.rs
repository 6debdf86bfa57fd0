//! Shared numerical kernel: adaptive Runge–Kutta with events, bisection,
//! tridiagonal eigenpairs, Hermite interpolation and quadrature.

pub mod interp;
pub mod ode;
pub mod quad;
pub mod roots;
pub mod tridiag;

pub use interp::{pchip_interpolant, CubicHermite, QuinticHermite};
pub use ode::{integrate, Direction, EventRecord, EventSpec, Integrator, IntegratorConfig, Trajectory};
pub use roots::{bisect, bisect_by, RootBracket};
pub use tridiag::{tridiag_eigen_lowest, Eigenpairs, TridiagonalSystem};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericsError {
    #[error("invalid integrator configuration: {0}")]
    InvalidConfig(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("step size underflow at t = {t} (h = {h:e}); singularity or blow-up")]
    StepSizeUnderflow { t: f64, h: f64 },
    #[error("maximum of {steps} steps exceeded at t = {t}")]
    MaxStepsExceeded { t: f64, steps: usize },
    #[error("non-finite state at t = {t}")]
    NonFinite { t: f64 },
    #[error("endpoints [{lo}, {hi}] do not bracket a sign/classification change")]
    InvalidBracket { lo: f64, hi: f64 },
    #[error("eigenpair {index} did not converge (residual {residual:e})")]
    EigenConvergence { index: usize, residual: f64 },
}

impl NumericsError {
    /// Independent-variable position where an integration failure occurred.
    pub fn location(&self) -> Option<f64> {
        match self {
            Self::StepSizeUnderflow { t, .. } | Self::MaxStepsExceeded { t, .. } | Self::NonFinite { t } => Some(*t),
            _ => None,
        }
    }
}
