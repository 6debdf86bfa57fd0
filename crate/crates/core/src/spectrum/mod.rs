//! Negative spectrum of 𝒜 = −∂ₓ² + V on the tortoise line, computed by
//! Richardson-extrapolated finite differences and independently by Prüfer
//! shooting with Wronskian matching.

pub mod checks;
pub mod fd;
pub mod potential;
pub mod shooting;

pub use checks::{
    check_eigenfunction_inequalities, node_count, quadratic_form_residuals, window_robustness, InequalityCheck,
};
pub use fd::eigen_fd;
pub use potential::{
    build_potential, default_grid, integral_v, DEFAULT_SPACING, DEFAULT_X_HI, DEFAULT_X_LO, MAX_DEFAULT_POINTS,
    ZERO_RADIUS_FACTOR, Background, Potential, PotentialProfile, SquareWell, YangMillsPotential, ZeroPotential};
pub use shooting::eigen_shooting;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numerics::NumericsError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectrumError {
    #[error("invalid window: {0}")]
    InvalidWindow(String),
    #[error("numerical failure: {0}")]
    Numerics(#[from] NumericsError),
    #[error("eigenvalue {index} could not be isolated: {detail}")]
    Isolation { index: usize, detail: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Fd,
    Shooting,
}

/// Negative eigenvalues μ₀ < μ₁ < … < 0 with eigenfunctions.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumReport {
    pub method: Method,
    /// Best estimates of μᵢ (Richardson-extrapolated for FD).
    pub eigenvalues: Vec<f64>,
    /// λᵢ = √(−μᵢ).
    pub growth_rates: Vec<f64>,
    /// Error estimate attached to each μᵢ.
    pub error_estimates: Vec<f64>,
    /// Eigenvalues of the discrete problem on `x_grid` itself.
    pub grid_eigenvalues: Vec<f64>,
    /// φᵢ on `x_grid`, zero at both ends, normalised to Σ h φ² = 1.
    pub eigenfunctions: Vec<Vec<f64>>,
    pub x_grid: Vec<f64>,
    pub h: f64,
    pub window: (f64, f64),
    /// Per pair: ‖Tφ − μφ‖ / ‖T‖ for finite differences, the Prüfer angle
    /// mismatch at the matching point for shooting.
    pub residuals: Vec<f64>,
    /// Number of negative eigenvalues found before truncation to k.
    pub negative_count: usize,
    pub cross_check_delta: Option<f64>,
}

impl SpectrumReport {
    pub fn empty(method: Method, x_grid: Vec<f64>, h: f64, window: (f64, f64)) -> Self {
        Self {
            method,
            eigenvalues: Vec::new(),
            growth_rates: Vec::new(),
            error_estimates: Vec::new(),
            grid_eigenvalues: Vec::new(),
            eigenfunctions: Vec::new(),
            x_grid,
            h,
            window,
            residuals: Vec::new(),
            negative_count: 0,
            cross_check_delta: None,
        }
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }
}

/// Largest relative eigenvalue disagreement between two reports, over the
/// pairs both contain. `None` when the reports differ in length.
pub fn relative_disagreement(a: &SpectrumReport, b: &SpectrumReport) -> Option<f64> {
    if a.len() != b.len() {
        return None;
    }
    Some(
        a.eigenvalues
            .iter()
            .zip(&b.eigenvalues)
            .map(|(x, y)| (x - y).abs() / x.abs().max(y.abs()))
            .fold(0.0, f64::max),
    )
}
