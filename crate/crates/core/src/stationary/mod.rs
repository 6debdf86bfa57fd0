//! Stationary solutions Wₙ of r(r − 1)W″ + W′ + W(1 − W²) = 0 with
//! W(1) = aₙ, exactly n zeros and W → (−1)ⁿ as r → ∞.

pub mod closed_form;
pub mod profile;
pub mod search;
pub mod seed;
pub mod shoot;
pub mod validate;

pub use profile::{ShotRecord, StationaryProfile, Tail};
pub use closed_form::{a1_exact, envelope_q, hamiltonian_h, l_of_q, w1_closed_form, AsymptoticSeries};
pub use search::{find_a_n, find_a_n_below, find_sequence};
pub use seed::{taylor_seed, HorizonSeed};
pub use validate::{check_sequence, validate_profile, validate_with_shots, Check, PropertyReport};
pub use shoot::{prufer_zero_count, shoot, sign_scan_zero_count, Classification, ShotOutcome};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numerics::{IntegratorConfig, NumericsError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StationaryError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("integration failed for a = {a} at r = {r:?}: {source}")]
    Integration { a: f64, r: Option<f64>, source: NumericsError },
    #[error("degenerate Prüfer point (W, W') = (0, 0) at r = {r}")]
    DegeneratePrufer { r: f64 },
    #[error("no bracket for n = {n}: {detail}")]
    BracketNotFound { n: usize, detail: String },
    #[error("resolution lost for n = {n}: {detail}")]
    ResolutionLost { n: usize, detail: String },
}

/// Tolerances and radii for shooting and the aₙ search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct StationaryConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Starting offset r = 1 + δ.
    pub delta: f64,
    /// Outer radius of a shot.
    pub r_max: f64,
    /// ε of the settle criterion.
    pub settle_eps: f64,
    /// Radius beyond which a turning point near ±1 counts as settled.
    pub settle_radius: f64,
    /// Width of the final bisection bracket in a.
    pub bisection_tol: f64,
    /// Radius where the inward integration of the matched profile starts.
    pub r_far: f64,
    #[serde(skip)]
    pub integrator: IntegratorConfig,
}

impl Default for StationaryConfig {
    fn default() -> Self {
        let integrator = IntegratorConfig::default();
        Self {
            rel_tol: integrator.rel_tol,
            abs_tol: integrator.abs_tol,
            delta: 1e-6,
            r_max: 1e6,
            settle_eps: 1e-3,
            settle_radius: 50.0,
            bisection_tol: 1e-13,
            r_far: 1e6,
            integrator,
        }
    }
}

impl StationaryConfig {
    /// Synchronises the integrator with `rel_tol`/`abs_tol` and checks ranges.
    pub fn validate(&self) -> Result<(), StationaryError> {
        let bad = |m: String| Err(StationaryError::InvalidConfig(m));
        if self.integrator.rel_tol != self.rel_tol || self.integrator.abs_tol != self.abs_tol {
            return bad("integrator tolerances out of sync; build the config with `with_tolerances`".into());
        }
        self.integrator.validate().map_err(|e| StationaryError::InvalidConfig(e.to_string()))?;
        if !(self.delta > 0.0 && self.delta <= seed::MAX_DELTA) {
            return bad(format!("delta = {} outside (0, {}]", self.delta, seed::MAX_DELTA));
        }
        if !(self.r_max > self.settle_radius && self.settle_radius > 1.0) {
            return bad("need 1 < settle_radius < r_max".into());
        }
        if !(self.settle_eps > 0.0 && self.settle_eps < 0.5) {
            return bad(format!("settle_eps = {} outside (0, 0.5)", self.settle_eps));
        }
        if !(self.bisection_tol >= 1e-13 * (1.0 - 1e-9)) {
            return bad(format!("bisection_tol = {} below 1e-13", self.bisection_tol));
        }
        if !(self.r_far > 10.0 && self.r_far.is_finite()) {
            return bad("r_far must exceed 10".into());
        }
        Ok(())
    }

    pub fn with_tolerances(mut self, rel_tol: f64, abs_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self.abs_tol = abs_tol;
        self.integrator.rel_tol = rel_tol;
        self.integrator.abs_tol = abs_tol;
        self
    }

    /// ODE tolerances divided by `factor`, bisection tolerance divided by
    /// `factor` down to its floor of 10⁻¹³.
    pub fn tightened(&self, factor: f64) -> Self {
        let mut c = self.clone().with_tolerances(self.rel_tol / factor, self.abs_tol / factor);
        c.bisection_tol = (self.bisection_tol / factor).max(1e-13);
        c
    }

    /// Re-derives the integrator from the serialised tolerance fields.
    pub fn synced(self) -> Self {
        let (r, a) = (self.rel_tol, self.abs_tol);
        self.with_tolerances(r, a)
    }
}
