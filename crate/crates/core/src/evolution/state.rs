//! Evolution grid, field state and initial data.

use std::sync::Arc;

use super::EvolutionError;
use crate::geometry::{potential_factor_p_rho, rho_of_x};
use crate::numerics::tridiag::{tridiag_eigen_lowest, TridiagonalSystem};
use crate::spectrum::Background;

/// Uniform x-grid with the background field and its potentials at the
/// nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionGrid {
    pub x: Vec<f64>,
    pub h: f64,
    /// P at the nodes.
    pub p: Vec<f64>,
    /// W_bg at the nodes.
    pub w_bg: Vec<f64>,
    /// V = P(3W_bg² − 1) at the nodes.
    pub v: Vec<f64>,
    pub background: String,
}

impl EvolutionGrid {
    /// `n_points` nodes spanning `window`, endpoints included.
    pub fn new(background: &Background, window: (f64, f64), n_points: usize) -> Result<Self, EvolutionError> {
        let (lo, hi) = window;
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() || n_points < 5 {
            return Err(EvolutionError::InvalidConfig(format!("window [{lo}, {hi}] with {n_points} points")));
        }
        let h = (hi - lo) / (n_points - 1) as f64;
        let x: Vec<f64> = (0..n_points).map(|i| lo + h * i as f64).collect();
        let rho: Vec<f64> = x.iter().map(|x| rho_of_x(*x)).collect();
        let p: Vec<f64> = rho.iter().map(|r| potential_factor_p_rho(*r)).collect();
        let w_bg: Vec<f64> = rho.iter().map(|r| background.w_rho(*r)).collect();
        let v = p.iter().zip(&w_bg).map(|(p, w)| p * (3.0 * w * w - 1.0)).collect();
        Ok(Self { x, h, p, w_bg, v, background: background.describe() })
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn window(&self) -> (f64, f64) {
        (self.x[0], self.x[self.x.len() - 1])
    }

    /// The grid of the background −W_bg.
    pub fn negated(&self) -> Self {
        let mut g = self.clone();
        g.w_bg.iter_mut().for_each(|w| *w = -*w);
        g.background = format!("-({})", self.background);
        g
    }

    /// −∂ₓ² + V with Dirichlet ends on the interior nodes.
    pub fn interior_operator(&self) -> Result<TridiagonalSystem, EvolutionError> {
        let h2 = self.h * self.h;
        let n = self.len();
        let diag = self.v[1..n - 1].iter().map(|v| 2.0 / h2 + v).collect();
        Ok(TridiagonalSystem::new(diag, vec![-1.0 / h2; n - 3])?)
    }
}

/// λ · min(|x_lo|, |x_hi|): e-folds of growth at rate λ during the time a
/// signal needs to travel between the potential well near x = 0 and the
/// nearer boundary.
pub fn boundary_efolds(grid: &EvolutionGrid, lambda: f64) -> f64 {
    let (lo, hi) = grid.window();
    lambda * lo.abs().min(hi.abs())
}

/// Deviation u = W − W_bg and its time derivative π at time t.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldState {
    pub grid: Arc<EvolutionGrid>,
    pub t: f64,
    pub u: Vec<f64>,
    pub pi: Vec<f64>,
}

impl FieldState {
    pub fn zero(grid: Arc<EvolutionGrid>) -> Self {
        let n = grid.len();
        Self { grid, t: 0.0, u: vec![0.0; n], pi: vec![0.0; n] }
    }

    pub fn new(grid: Arc<EvolutionGrid>, u: Vec<f64>, pi: Vec<f64>) -> Result<Self, EvolutionError> {
        if u.len() != grid.len() || pi.len() != grid.len() {
            return Err(EvolutionError::InvalidConfig(format!("fields of length {} / {} on {} nodes", u.len(), pi.len(), grid.len())));
        }
        if u.iter().chain(&pi).any(|v| !v.is_finite()) {
            return Err(EvolutionError::NonFinite { last_valid_t: 0.0 });
        }
        Ok(Self { grid, t: 0.0, u, pi })
    }

    /// W = W_bg + u at the nodes.
    pub fn total_field(&self) -> Vec<f64> {
        self.grid.w_bg.iter().zip(&self.u).map(|(w, u)| w + u).collect()
    }

    pub fn max_abs_u(&self) -> f64 {
        self.u.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// The state (−u, −π) about the background −W_bg.
    pub fn negated(&self) -> Self {
        Self {
            grid: Arc::new(self.grid.negated()),
            t: self.t,
            u: self.u.iter().map(|v| -v).collect(),
            pi: self.pi.iter().map(|v| -v).collect(),
        }
    }
}

/// Growing eigenmode data ε(φ₀, λφ₀) from the lowest eigenpair of the
/// discrete operator on this grid (φ₀ positive at its peak, Σhφ₀² = 1).
/// Returns the state and the discrete growth rate λ, or `None` when the
/// operator has no negative eigenvalue.
pub fn eigenmode(grid: Arc<EvolutionGrid>, epsilon: f64) -> Result<Option<(FieldState, f64)>, EvolutionError> {
    let op = grid.interior_operator()?;
    if op.sturm_count(0.0) == 0 {
        return Ok(None);
    }
    let pair = tridiag_eigen_lowest(&op, 1)?;
    let mu = pair.values[0];
    let lambda = (-mu).sqrt();
    let scale = epsilon / grid.h.sqrt();
    let mut u = vec![0.0; grid.len()];
    for (slot, v) in u[1..].iter_mut().zip(&pair.vectors[0]) {
        *slot = scale * v;
    }
    let pi = u.iter().map(|v| lambda * v).collect();
    Ok(Some((FieldState::new(grid, u, pi)?, lambda)))
}

/// Direction of propagation of a pulse.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PulseDirection {
    /// π = 0: splits into two halves.
    Static,
    /// π = −u′: moves towards larger x.
    Right,
    /// π = u′: moves towards smaller x.
    Left,
}

/// u = A exp(−((x − c)/w)²).
pub fn gaussian_pulse(
    grid: Arc<EvolutionGrid>,
    center: f64,
    width: f64,
    amplitude: f64,
    direction: PulseDirection,
) -> Result<FieldState, EvolutionError> {
    if !(width > 0.0) {
        return Err(EvolutionError::InvalidConfig(format!("pulse width {width}")));
    }
    let u: Vec<f64> = grid.x.iter().map(|x| amplitude * (-((x - center) / width).powi(2)).exp()).collect();
    let du = |x: f64, u: f64| -2.0 * (x - center) / (width * width) * u;
    let pi = grid
        .x
        .iter()
        .zip(&u)
        .map(|(x, u)| match direction {
            PulseDirection::Static => 0.0,
            PulseDirection::Right => -du(*x, *u),
            PulseDirection::Left => du(*x, *u),
        })
        .collect();
    FieldState::new(grid, u, pi)
}
