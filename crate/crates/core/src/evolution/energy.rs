//! Discrete energy 𝓔 = ∫ Ẇ² + (W′)² + (P/2)(W² − 1)² dx with W = W_bg + u.

use serde::{Deserialize, Serialize};

use super::state::FieldState;

/// Energy parts at one time. Node sums use trapezoid weights; the gradient
/// uses forward differences on each cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport {
    pub t: f64,
    pub total: f64,
    pub kinetic: f64,
    pub gradient: f64,
    pub potential: f64,
    /// (Σ h[π² + P u²] + Σ h (D₊u)²)^{1/2}.
    pub deviation_norm: f64,
    pub max_abs_u: f64,
}

fn trapezoid(h: f64, values: impl Iterator<Item = f64>, n: usize) -> f64 {
    values.enumerate().map(|(i, v)| if i == 0 || i + 1 == n { 0.5 * h * v } else { h * v }).sum()
}

fn cell_gradient(h: f64, f: &[f64]) -> f64 {
    f.windows(2).map(|w| (w[1] - w[0]).powi(2)).sum::<f64>() / h
}

pub fn energy(state: &FieldState) -> EnergyReport {
    let g = &state.grid;
    let n = g.len();
    let h = g.h;
    let w = state.total_field();
    let kinetic = trapezoid(h, state.pi.iter().map(|p| p * p), n);
    let gradient = cell_gradient(h, &w);
    let potential = trapezoid(h, g.p.iter().zip(&w).map(|(p, w)| 0.5 * p * (w * w - 1.0).powi(2)), n);
    let dev_sq = trapezoid(h, state.pi.iter().zip(&state.u).zip(&g.p).map(|((pi, u), p)| pi * pi + p * u * u), n)
        + cell_gradient(h, &state.u);
    EnergyReport {
        t: state.t,
        total: kinetic + gradient + potential,
        kinetic,
        gradient,
        potential,
        deviation_norm: dev_sq.sqrt(),
        max_abs_u: state.max_abs_u(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evolution::state::EvolutionGrid;
    use crate::geometry::radius_r;
    use crate::spectrum::Background;
    use std::sync::Arc;

    #[test]
    fn vacuum_has_zero_energy() {
        let g = Arc::new(EvolutionGrid::new(&Background::Constant(1.0), (-50.0, 100.0), 1001).unwrap());
        let e = energy(&FieldState::zero(g));
        assert_eq!(e.total, 0.0);
        assert_eq!(e.deviation_norm, 0.0);
    }

    #[test]
    fn zero_field_energy_is_half_integral_of_p() {
        let window = (-40.0, 200.0);
        let g = Arc::new(EvolutionGrid::new(&Background::Constant(0.0), window, 24001).unwrap());
        let e = energy(&FieldState::zero(g));
        let exact = 0.5 * (1.0 / radius_r(window.0) - 1.0 / radius_r(window.1));
        assert!((e.total - exact).abs() < 1e-5 * exact, "{} vs {exact}", e.total);
        assert_eq!(e.kinetic, 0.0);
        assert_eq!(e.gradient, 0.0);
    }
}
