//! Second-order finite differences with Dirichlet ends and Richardson
//! extrapolation over h and h/2.

use super::potential::PotentialProfile;
use super::{Method, SpectrumError, SpectrumReport};
use crate::numerics::tridiag::{tridiag_eigen_lowest, TridiagonalSystem};

fn assemble(profile: &PotentialProfile) -> Result<TridiagonalSystem, SpectrumError> {
    let h2 = profile.h * profile.h;
    let interior = &profile.v_grid[1..profile.v_grid.len() - 1];
    let diag = interior.iter().map(|v| 2.0 / h2 + v).collect();
    let off = vec![-1.0 / h2; interior.len() - 1];
    Ok(TridiagonalSystem::new(diag, off)?)
}

/// The `k` lowest negative eigenpairs by finite differences.
///
/// The grid of `profile` (spacing h) and the same window at h/2 are solved
/// separately; eigenvalues are extrapolated as (4μ_{h/2} − μ_h)/3 with error
/// estimate |μ_{h/2} − μ_h|/3. Eigenfunctions are those on the grid of
/// `profile`. An empty spectrum is a valid result.
pub fn eigen_fd(profile: &PotentialProfile, k: usize) -> Result<SpectrumReport, SpectrumError> {
    let mut report = SpectrumReport::empty(Method::Fd, profile.x_grid.clone(), profile.h, profile.window);
    if k == 0 {
        return Ok(report);
    }
    let fine = profile.resampled(2 * profile.x_grid.len() - 1)?;
    let coarse_sys = assemble(profile)?;
    let fine_sys = assemble(&fine)?;
    let count = coarse_sys.sturm_count(0.0).min(fine_sys.sturm_count(0.0));
    report.negative_count = count;
    let m = count.min(k);
    if m == 0 {
        return Ok(report);
    }
    let coarse = tridiag_eigen_lowest(&coarse_sys, m)?;
    let norm = coarse_sys.gershgorin().0.abs().max(coarse_sys.gershgorin().1.abs());
    for i in 0..m {
        let mu_h = coarse.values[i];
        let mu_h2 = fine_sys.eigenvalue(i);
        let mu = (4.0 * mu_h2 - mu_h) / 3.0;
        if !(mu < 0.0) {
            break;
        }
        let scale = 1.0 / profile.h.sqrt();
        let mut phi = Vec::with_capacity(profile.x_grid.len());
        phi.push(0.0);
        phi.extend(coarse.vectors[i].iter().map(|v| v * scale));
        phi.push(0.0);
        report.eigenvalues.push(mu);
        report.growth_rates.push((-mu).sqrt());
        report.error_estimates.push((mu_h2 - mu_h).abs() / 3.0);
        report.grid_eigenvalues.push(mu_h);
        report.eigenfunctions.push(phi);
        report.residuals.push(coarse.residuals[i] / norm);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectrum::potential::{SquareWell, ZeroPotential};
    use std::sync::Arc;

    #[test]
    fn zero_potential_has_no_bound_states() {
        let p = PotentialProfile::sample(Arc::new(ZeroPotential), (-20.0, 20.0), 801).unwrap();
        let r = eigen_fd(&p, 3).unwrap();
        assert!(r.is_empty());
        assert_eq!(r.negative_count, 0);
    }

    /// Even bound state of the unit square well: k tan k = κ with
    /// k² + κ² = 1, solved by bisection on k ∈ (0, π/2).
    fn square_well_oracle() -> f64 {
        let (mut lo, mut hi) = (1e-9f64, std::f64::consts::FRAC_PI_2 - 1e-12);
        for _ in 0..200 {
            let k = 0.5 * (lo + hi);
            if k * k.tan() - (1.0 - k * k).sqrt() > 0.0 {
                hi = k;
            } else {
                lo = k;
            }
        }
        let k = 0.5 * (lo + hi);
        -(1.0 - k * k)
    }

    #[test]
    fn square_well_single_bound_state() {
        let well = SquareWell { depth: 1.0, half_width: 1.0 };
        let p = PotentialProfile::sample(Arc::new(well), (-40.0, 40.0), 1601).unwrap();
        let r = eigen_fd(&p, 3).unwrap();
        assert_eq!(r.len(), 1);
        let exact = square_well_oracle();
        assert!((exact + 0.4538).abs() < 1e-4);
        assert!((r.eigenvalues[0] - exact).abs() <= 1e-6 * exact.abs(), "{} vs {exact}", r.eigenvalues[0]);
        assert!(r.error_estimates[0] < 1e-4);
        assert!(r.residuals[0] < 1e-12);
    }

    #[test]
    fn richardson_improves_on_both_grids() {
        let well = SquareWell { depth: 1.0, half_width: 1.0 };
        let p = PotentialProfile::sample(Arc::new(well), (-40.0, 40.0), 801).unwrap();
        let r = eigen_fd(&p, 1).unwrap();
        let exact = square_well_oracle();
        assert!((r.eigenvalues[0] - exact).abs() < (r.grid_eigenvalues[0] - exact).abs());
    }
}
