//! Time evolution of W(t, x) = W_bg(x) + u(t, x) on a uniform tortoise grid.
//!
//! The deviation obeys
//! ü − u″ + P(3W_bg² − 1)u + P u²(u + 3W_bg) = 0,
//! with the last term dropped in linear mode. Space is discretised by the
//! centred second difference, time by classical fourth-order Runge–Kutta,
//! and the two end nodes carry first-order Sommerfeld conditions
//! ∂ₜu = ∂ₓu at x_lo and ∂ₜu = −∂ₓu at x_hi.

pub mod energy;
pub mod fit;
pub mod integrate;
pub mod state;

pub use energy::{energy, EnergyReport};
pub use fit::{compare_runs, fit_growth, FitConfig, FitStatus, GrowthFit, RunComparison};
pub use integrate::{evolve, rhs, step, EvolutionRun, EvolveConfig, Snapshot, Termination};
pub use state::{boundary_efolds, eigenmode, gaussian_pulse, EvolutionGrid, FieldState, PulseDirection};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numerics::NumericsError;

/// Default evolution window in x.
pub const DEFAULT_WINDOW: (f64, f64) = (-100.0, 300.0);
pub const DEFAULT_POINTS: usize = 4096;
pub const DEFAULT_CFL: f64 = 0.5;
/// max|u| at which instability runs leave the linear regime by policy.
pub const SATURATION: f64 = 0.05;
/// Fewer e-folds of growth than this before boundary effects can reach
/// the potential well triggers a warning.
pub const MIN_BOUNDARY_EFOLDS: f64 = 10.0;
/// Runs stop once |W| exceeds 1 + this guard.
pub const OVERFLOW_GUARD: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Linear,
    Nonlinear,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvolutionError {
    #[error("invalid evolution setup: {0}")]
    InvalidConfig(String),
    #[error("time step {dt} exceeds CFL limit {cfl} × h = {limit}")]
    Cfl { dt: f64, cfl: f64, limit: f64 },
    #[error("non-finite field after t = {last_valid_t}")]
    NonFinite { last_valid_t: f64 },
    #[error("numerical failure: {0}")]
    Numerics(#[from] NumericsError),
}
