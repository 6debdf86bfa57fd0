//! Consistency checks on computed eigenpairs.

use serde::{Deserialize, Serialize};

use super::potential::PotentialProfile;
use super::{eigen_fd, SpectrumError, SpectrumReport};

/// Interior sign changes of a sampled eigenfunction, ignoring entries below
/// 10⁻¹⁰ of its maximum.
pub fn node_count(phi: &[f64]) -> usize {
    let max = phi.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let floor = 1e-10 * max;
    let mut last = 0.0f64;
    let mut count = 0;
    for &v in phi {
        if v.abs() > floor {
            if last != 0.0 && v.signum() != last {
                count += 1;
            }
            last = v.signum();
        }
    }
    count
}

/// Result of the two eigenfunction inequalities for one pair:
/// ∫P φ² ≥ λ² ∫φ² and −∫V φ² ≥ 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityCheck {
    pub index: usize,
    /// ∫Pφ² − λ²∫φ², `None` when V is not of the form P(3W² − 1).
    pub lapse_slack: Option<f64>,
    /// −∫Vφ².
    pub potential_slack: Option<f64>,
    pub skipped: bool,
    pub pass: bool,
}

/// Evaluates both inequalities for every pair of `report` by quadrature on
/// its grid. Skipped when the potential carries no factor P.
pub fn check_eigenfunction_inequalities(report: &SpectrumReport, potential: &PotentialProfile) -> Vec<InequalityCheck> {
    let lapse = potential.lapse_grid();
    report
        .eigenfunctions
        .iter()
        .enumerate()
        .map(|(index, phi)| {
            let Some(p) = &lapse else {
                return InequalityCheck { index, lapse_slack: None, potential_slack: None, skipped: true, pass: true };
            };
            let h = potential.h;
            let lambda2 = -report.eigenvalues[index];
            let norm: f64 = phi.iter().map(|v| v * v).sum::<f64>() * h;
            let p_int: f64 = phi.iter().zip(p).map(|(v, pp)| pp * v * v).sum::<f64>() * h;
            let v_int: f64 = phi.iter().zip(&potential.v_grid).map(|(v, vv)| vv * v * v).sum::<f64>() * h;
            let lapse_slack = p_int - lambda2 * norm;
            let potential_slack = -v_int;
            InequalityCheck {
                index,
                lapse_slack: Some(lapse_slack),
                potential_slack: Some(potential_slack),
                skipped: false,
                pass: lapse_slack > 0.0 && potential_slack > 0.0,
            }
        })
        .collect()
}

/// |Σh(D₊φ)² + ΣhVφ² − μΣhφ²| / Σhφ² per pair, using the eigenvalue of the
/// grid on which φ was computed.
pub fn quadratic_form_residuals(report: &SpectrumReport, potential: &PotentialProfile) -> Vec<f64> {
    let h = potential.h;
    report
        .eigenfunctions
        .iter()
        .zip(&report.grid_eigenvalues)
        .map(|(phi, mu)| {
            let grad: f64 = phi.windows(2).map(|w| ((w[1] - w[0]) / h).powi(2)).sum::<f64>() * h;
            let pot: f64 = phi.iter().zip(&potential.v_grid).map(|(v, vv)| vv * v * v).sum::<f64>() * h;
            let norm: f64 = phi.iter().map(|v| v * v).sum::<f64>() * h;
            (grad + pot - mu * norm).abs() / norm
        })
        .collect()
}

/// |Δμᵢ| from widening the window by 50% at each end (x_lo → 1.5 x_lo for
/// x_lo < 0, x_hi → 1.5 x_hi), FD with Richardson at fixed h.
pub fn window_robustness(potential: &PotentialProfile, k: usize) -> Result<Vec<f64>, SpectrumError> {
    let base = eigen_fd(potential, k)?;
    let (lo, hi) = potential.window;
    let widen = |v: f64| if v < 0.0 { 1.5 * v } else { v + 0.5 * v.abs() };
    let wide = potential.rewindowed((widen(lo), widen(hi)))?;
    let other = eigen_fd(&wide, k)?;
    Ok(base
        .eigenvalues
        .iter()
        .enumerate()
        .map(|(i, mu)| other.eigenvalues.get(i).map_or(f64::INFINITY, |m| (m - mu).abs()))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn node_counting() {
        assert_eq!(node_count(&[0.0, 1.0, 2.0, 1.0, 0.0]), 0);
        assert_eq!(node_count(&[0.0, 1.0, -1.0, 0.0]), 1);
        assert_eq!(node_count(&[0.0, 1.0, 1e-14, -1e-14, 1.0, -2.0, 0.0]), 1);
    }
}
