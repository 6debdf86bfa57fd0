//! Potentials of −∂ₓ² + V on the tortoise line and their sampled form.

use std::sync::Arc;

use super::SpectrumError;
use crate::geometry::{potential_factor_p_rho, rho_of_x};
use crate::numerics::quad::gauss_legendre_panels;
use crate::stationary::StationaryProfile;

/// A potential V(x).
pub trait Potential: Send + Sync {
    fn value(&self, x: f64) -> f64;

    /// Mean of V over [x − h/2, x + h/2], used as the FD node value.
    fn cell_average(&self, x: f64, _h: f64) -> f64 {
        self.value(x)
    }

    /// Points where V is discontinuous.
    fn breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }

    /// The factor P(x) when V = P(3W² − 1), otherwise `None`.
    fn lapse_factor(&self, _x: f64) -> Option<f64> {
        None
    }

    /// Short description for report metadata.
    fn describe(&self) -> String;
}

/// Background field W on which the linearisation is taken.
#[derive(Debug, Clone)]
pub enum Background {
    Profile(Arc<StationaryProfile>),
    Constant(f64),
}

impl Background {
    /// W at ρ = r − 1.
    pub fn w_rho(&self, rho: f64) -> f64 {
        match self {
            Background::Profile(p) => p.eval_rho(rho)[0],
            Background::Constant(v) => *v,
        }
    }

    /// W at tortoise coordinate x.
    pub fn w_at_x(&self, x: f64) -> f64 {
        self.w_rho(rho_of_x(x))
    }

    /// Limit of W as r → ∞.
    pub fn far_limit(&self) -> f64 {
        match self {
            Background::Profile(p) => p.limit_sign,
            Background::Constant(v) => *v,
        }
    }

    pub fn zero_count(&self) -> Option<usize> {
        match self {
            Background::Profile(p) => Some(p.n),
            Background::Constant(_) => None,
        }
    }

    /// Radius of the outermost sign change of W, from the profile knots.
    pub fn outer_zero(&self) -> Option<f64> {
        match self {
            Background::Profile(p) => p
                .w
                .windows(2)
                .zip(p.rho.windows(2))
                .filter(|(w, _)| w[0] * w[1] < 0.0)
                .map(|(w, rho)| 1.0 + rho[0] + (rho[1] - rho[0]) * w[0] / (w[0] - w[1]))
                .last(),
            Background::Constant(_) => None,
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Background::Profile(p) => format!("W_{} (a = {:.16e})", p.n, p.a_n),
            Background::Constant(v) => format!("W = {v}"),
        }
    }
}

/// V = P(3W² − 1) about a background W.
#[derive(Debug, Clone)]
pub struct YangMillsPotential {
    pub background: Background,
}

impl YangMillsPotential {
    pub fn new(background: Background) -> Self {
        Self { background }
    }
}

impl Potential for YangMillsPotential {
    fn value(&self, x: f64) -> f64 {
        let rho = rho_of_x(x);
        let w = self.background.w_rho(rho);
        potential_factor_p_rho(rho) * (3.0 * w * w - 1.0)
    }

    fn lapse_factor(&self, x: f64) -> Option<f64> {
        Some(potential_factor_p_rho(rho_of_x(x)))
    }

    fn describe(&self) -> String {
        format!("P(3W^2-1) about {}", self.background.describe())
    }
}

/// V = −depth on |x| ≤ half_width, 0 outside.
#[derive(Debug, Clone, Copy)]
pub struct SquareWell {
    pub depth: f64,
    pub half_width: f64,
}

impl Potential for SquareWell {
    fn value(&self, x: f64) -> f64 {
        if x.abs() <= self.half_width {
            -self.depth
        } else {
            0.0
        }
    }

    fn cell_average(&self, x: f64, h: f64) -> f64 {
        let (a, b) = (x - 0.5 * h, x + 0.5 * h);
        let overlap = (b.min(self.half_width) - a.max(-self.half_width)).max(0.0);
        -self.depth * overlap / h
    }

    fn breakpoints(&self) -> Vec<f64> {
        vec![-self.half_width, self.half_width]
    }

    fn describe(&self) -> String {
        format!("square well depth {} half-width {}", self.depth, self.half_width)
    }
}

/// V ≡ 0.
#[derive(Debug, Clone, Copy)]
pub struct ZeroPotential;

impl Potential for ZeroPotential {
    fn value(&self, _x: f64) -> f64 {
        0.0
    }

    fn describe(&self) -> String {
        "zero potential".into()
    }
}

/// A potential sampled at the nodes of a uniform x-grid.
#[derive(Clone)]
pub struct PotentialProfile {
    pub x_grid: Vec<f64>,
    pub v_grid: Vec<f64>,
    pub h: f64,
    pub window: (f64, f64),
    /// ∫V dx over the whole line, when it is available in closed r-form.
    pub integral_v: Option<f64>,
    pub solution_ref: String,
    pub source: Arc<dyn Potential>,
}

impl std::fmt::Debug for PotentialProfile {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PotentialProfile")
            .field("window", &self.window)
            .field("h", &self.h)
            .field("n_points", &self.x_grid.len())
            .field("integral_v", &self.integral_v)
            .field("solution_ref", &self.solution_ref)
            .finish()
    }
}

impl PotentialProfile {
    /// Samples `source` at `n_points` uniform nodes spanning `window`
    /// (endpoints included).
    pub fn sample(source: Arc<dyn Potential>, window: (f64, f64), n_points: usize) -> Result<Self, SpectrumError> {
        let (lo, hi) = window;
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(SpectrumError::InvalidWindow(format!("[{lo}, {hi}]")));
        }
        if n_points < 3 {
            return Err(SpectrumError::InvalidWindow(format!("{n_points} grid points")));
        }
        let h = (hi - lo) / (n_points - 1) as f64;
        let x_grid: Vec<f64> = (0..n_points).map(|i| lo + h * i as f64).collect();
        let v_grid = x_grid.iter().map(|x| source.cell_average(*x, h)).collect();
        Ok(Self { x_grid, v_grid, h, window, integral_v: None, solution_ref: source.describe(), source })
    }

    /// Same source and window at a different number of points.
    pub fn resampled(&self, n_points: usize) -> Result<Self, SpectrumError> {
        let mut p = Self::sample(self.source.clone(), self.window, n_points)?;
        p.integral_v = self.integral_v;
        p.solution_ref = self.solution_ref.clone();
        Ok(p)
    }

    /// Same source on a different window with (approximately) the same h.
    pub fn rewindowed(&self, window: (f64, f64)) -> Result<Self, SpectrumError> {
        let n = ((window.1 - window.0) / self.h).round() as usize + 1;
        let mut p = Self::sample(self.source.clone(), window, n)?;
        p.integral_v = self.integral_v;
        p.solution_ref = self.solution_ref.clone();
        Ok(p)
    }

    /// P at the grid nodes, when V = P(3W² − 1).
    pub fn lapse_grid(&self) -> Option<Vec<f64>> {
        self.x_grid.iter().map(|x| self.source.lapse_factor(*x)).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.v_grid.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }
}

/// Largest default lower window end; P ≈ e^{x−1} there.
pub const DEFAULT_X_LO: f64 = -60.0;
/// Smallest default upper window end, where 2/x² is below 10⁻⁶·max|V|.
pub const DEFAULT_X_HI: f64 = 4000.0;
/// Half-width of the window in multiples of the outermost zero radius of W.
pub const ZERO_RADIUS_FACTOR: f64 = 20.0;
pub const DEFAULT_SPACING: f64 = 0.1;
/// Cap on default grid size; h grows beyond `DEFAULT_SPACING` to respect it.
pub const MAX_DEFAULT_POINTS: usize = (1 << 22) + 1;

/// Default window and number of grid points for `background`.
///
/// The weakest bound state of Wₙ has |μ| of the order of the potential at
/// the outermost zero r_z of W and decays on both sides over a length of
/// the order of r_z, so the window is
/// [min(`DEFAULT_X_LO`, −20 r_z), max(`DEFAULT_X_HI`, 20 r_z)].
pub fn default_grid(background: &Background) -> ((f64, f64), usize) {
    let reach = ZERO_RADIUS_FACTOR * background.outer_zero().unwrap_or(0.0);
    let window = (DEFAULT_X_LO.min(-reach).floor(), DEFAULT_X_HI.max(reach).ceil());
    let n = ((window.1 - window.0) / DEFAULT_SPACING).round() as usize + 1;
    (window, n.min(MAX_DEFAULT_POINTS))
}

/// V = P(3W² − 1) about `background` on a uniform grid, with ∫V attached.
pub fn build_potential(background: Background, window: (f64, f64), n_points: usize) -> Result<PotentialProfile, SpectrumError> {
    let integral = integral_v(&background);
    let source: Arc<dyn Potential> = Arc::new(YangMillsPotential::new(background));
    let mut p = PotentialProfile::sample(source, window, n_points)?;
    p.integral_v = Some(integral);
    Ok(p)
}

/// ∫ V dx over the whole line, evaluated as ∫₁^∞ (3W² − 1)/r² dr. The
/// range beyond the last profile knot uses the far limit W² = 1, whose
/// contribution is 2/r_hi.
pub fn integral_v(background: &Background) -> f64 {
    match background {
        Background::Constant(w) => 3.0 * w * w - 1.0,
        Background::Profile(p) => {
            let mut edges = vec![1.0];
            edges.extend(p.rho.iter().map(|rho| 1.0 + rho));
            let r_hi = *edges.last().expect("non-empty");
            let body = gauss_legendre_panels(
                |r| {
                    let w = p.eval_rho(r - 1.0)[0];
                    (3.0 * w * w - 1.0) / (r * r)
                },
                &edges,
            );
            body + 2.0 / r_hi
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{potential_factor_p, radius_r};

    #[test]
    fn constant_backgrounds() {
        let one = build_potential(Background::Constant(1.0), (-30.0, 200.0), 2001).unwrap();
        for (x, v) in one.x_grid.iter().zip(&one.v_grid) {
            let p = potential_factor_p(radius_r(*x)).unwrap();
            assert!((v - 2.0 * p).abs() <= 1e-15);
        }
        assert_eq!(one.integral_v, Some(2.0));
        let zero = build_potential(Background::Constant(0.0), (-30.0, 200.0), 11).unwrap();
        assert!(zero.x_grid.iter().zip(&zero.v_grid).all(|(x, v)| (v + potential_factor_p(radius_r(*x)).unwrap()).abs() < 1e-15));
        assert_eq!(zero.integral_v, Some(-1.0));
    }

    #[test]
    fn square_well_cell_average() {
        let well = SquareWell { depth: 1.0, half_width: 1.0 };
        assert_eq!(well.cell_average(0.0, 0.1), -1.0);
        assert!((well.cell_average(1.0, 0.1) + 0.5).abs() < 1e-14);
        assert_eq!(well.cell_average(2.0, 0.1), 0.0);
        assert!((well.cell_average(1.02, 0.1) + 0.3).abs() < 1e-12);
    }

    #[test]
    fn bounds_between_minus_p_and_two_p() {
        let w = Background::Constant(0.3);
        let pot = YangMillsPotential::new(w);
        for x in [-40.0, -3.0, 0.0, 1.0, 50.0] {
            let p = pot.lapse_factor(x).unwrap();
            let v = pot.value(x);
            assert!(v >= -p && v <= 2.0 * p);
        }
    }

    #[test]
    fn rejects_bad_window() {
        assert!(PotentialProfile::sample(Arc::new(ZeroPotential), (1.0, 1.0), 10).is_err());
        assert!(PotentialProfile::sample(Arc::new(ZeroPotential), (0.0, 1.0), 2).is_err());
    }
}
