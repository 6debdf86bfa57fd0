//! Prüfer shooting for −φ″ + Vφ = μφ with φ = 0 at both window ends.
//!
//! With φ = R sin θ and φ′ = R cos θ the angle obeys
//! θ′ = cos²θ + (μ − V) sin²θ and ln R obeys (ln R)′ = (1 − μ + V) sin θ cos θ.
//! Started at θ = 0, the number of Dirichlet eigenvalues below μ is
//! ⌊θ(x_hi)/π⌋. Each eigenvalue is isolated by bisection on that count and
//! then located as the root of the Wronskian mismatch θ_L(x_m) − θ_R(x_m),
//! where θ_R runs backward from (i + 1)π.

use std::f64::consts::PI;

use super::potential::PotentialProfile;
use super::{Method, SpectrumError, SpectrumReport};
use crate::numerics::ode::{Integrator, IntegratorConfig, Trajectory};

fn prufer_config() -> IntegratorConfig {
    IntegratorConfig { rel_tol: 1e-12, abs_tol: 1e-13, max_step: f64::INFINITY, initial_step: 1e-3, max_steps: 5_000_000 }
}

/// Largest step at `x`: 2 near the well, growing linearly where V varies
/// on the scale |x|.
fn step_cap(x: f64) -> f64 {
    2.0 + 0.02 * x.abs()
}

struct Shooter<'a> {
    profile: &'a PotentialProfile,
    /// Window ends and interior discontinuities, ascending.
    knots: Vec<f64>,
}

impl<'a> Shooter<'a> {
    fn new(profile: &'a PotentialProfile) -> Self {
        let (lo, hi) = profile.window;
        let mut knots = vec![lo];
        knots.extend(profile.source.breakpoints().into_iter().filter(|b| *b > lo && *b < hi));
        knots.push(hi);
        Self { profile, knots }
    }

    /// Integrates (θ, ln R) from `from` to `to`, restarting at every
    /// breakpoint in between. Returns one trajectory per piece.
    fn sweep(&self, mu: f64, from: f64, theta0: f64, to: f64) -> Result<Vec<Trajectory<2>>, SpectrumError> {
        let src = self.profile.source.clone();
        let rhs = move |x: f64, y: &[f64; 2]| {
            let (s, c) = y[0].sin_cos();
            let q = mu - src.value(x);
            [c * c + q * s * s, (1.0 - q) * s * c]
        };
        let mut stops: Vec<f64> = self.knots.iter().copied().filter(|k| (*k - from) * (*k - to) < 0.0).collect();
        if to < from {
            stops.reverse();
        }
        stops.push(to);
        let integrator = Integrator::new(prufer_config()).step_cap(step_cap);
        let mut pieces = Vec::with_capacity(stops.len());
        let mut x = from;
        let mut state = [theta0, 0.0];
        for stop in stops {
            if stop == x {
                continue;
            }
            let tr = integrator.run(&rhs, x, state, stop)?;
            state = tr.last_y();
            x = stop;
            pieces.push(tr);
        }
        Ok(pieces)
    }

    fn angle(&self, mu: f64, from: f64, theta0: f64, to: f64) -> Result<f64, SpectrumError> {
        let pieces = self.sweep(mu, from, theta0, to)?;
        Ok(pieces.last().map_or(theta0, |p| p.last_y()[0]))
    }

    /// Number of Dirichlet eigenvalues strictly below μ.
    fn count(&self, mu: f64) -> Result<usize, SpectrumError> {
        let (lo, hi) = self.profile.window;
        let theta = self.angle(mu, lo, 0.0, hi)?;
        Ok((theta / PI).floor().max(0.0) as usize)
    }

    fn mismatch(&self, mu: f64, index: usize, x_m: f64) -> Result<f64, SpectrumError> {
        let (lo, hi) = self.profile.window;
        let left = self.angle(mu, lo, 0.0, x_m)?;
        let right = self.angle(mu, hi, (index + 1) as f64 * PI, x_m)?;
        Ok(left - right)
    }

    /// Midpoint of the region where V < μ, or the potential minimum.
    fn matching_point(&self, mu: f64) -> f64 {
        let p = self.profile;
        let allowed: Vec<f64> = p.x_grid.iter().zip(&p.v_grid).filter(|(_, v)| **v < mu).map(|(x, _)| *x).collect();
        match (allowed.first(), allowed.last()) {
            (Some(a), Some(b)) => 0.5 * (a + b),
            _ => {
                let (i, _) = p.v_grid.iter().enumerate().fold((0, f64::INFINITY), |(bi, bv), (i, v)| if *v < bv { (i, *v) } else { (bi, bv) });
                p.x_grid[i]
            }
        }
    }

    /// Eigenfunction on the grid from the left sweep up to x_m and the right
    /// sweep down to x_m, joined with matching amplitude at x_m.
    fn eigenfunction(&self, mu: f64, index: usize, x_m: f64) -> Result<Vec<f64>, SpectrumError> {
        let p = self.profile;
        let (lo, hi) = p.window;
        let left = self.sweep(mu, lo, 0.0, x_m)?;
        let right = self.sweep(mu, hi, (index + 1) as f64 * PI, x_m)?;
        let at_end = |pieces: &[Trajectory<2>]| pieces.last().map_or([0.0, 0.0], |t| t.last_y());
        let (l_m, r_m) = (at_end(&left), at_end(&right));
        // φ = R sin θ from both sides; scale ln R so that R matches at x_m,
        // and orient the right branch to match the sign of the left one.
        let shift = l_m[1] - r_m[1];
        let orient = if (l_m[0].sin() >= 0.0) == (r_m[0].sin() >= 0.0) { 1.0 } else { -1.0 };
        let lookup = |pieces: &[Trajectory<2>], x: f64| pieces.iter().find_map(|t| t.eval(x));
        let mut out = vec![0.0; p.x_grid.len()];
        let mut log_max = f64::NEG_INFINITY;
        let mut raw = Vec::with_capacity(p.x_grid.len());
        for &x in &p.x_grid {
            let (y, sign, add) = if x <= x_m {
                (lookup(&left, x), 1.0, 0.0)
            } else {
                (lookup(&right, x), orient, shift)
            };
            let y = y.unwrap_or([0.0, f64::NEG_INFINITY]);
            let log_r = y[1] + add;
            log_max = log_max.max(log_r);
            raw.push((sign * y[0].sin(), log_r));
        }
        for (o, (s, log_r)) in out.iter_mut().zip(raw) {
            *o = s * (log_r - log_max).exp();
        }
        out[0] = 0.0;
        *out.last_mut().expect("non-empty") = 0.0;
        let norm = (out.iter().map(|v| v * v).sum::<f64>() * p.h).sqrt();
        let peak = out.iter().fold(0.0f64, |m, v| if v.abs() > m.abs() { *v } else { m });
        let sign = if peak < 0.0 { -1.0 } else { 1.0 };
        Ok(out.iter().map(|v| sign * v / norm).collect())
    }
}

/// The `k` lowest negative Dirichlet eigenvalues on the window of
/// `profile`, with eigenfunctions sampled on its grid.
pub fn eigen_shooting(profile: &PotentialProfile, k: usize) -> Result<SpectrumReport, SpectrumError> {
    let mut report = SpectrumReport::empty(Method::Shooting, profile.x_grid.clone(), profile.h, profile.window);
    if k == 0 {
        return Ok(report);
    }
    let shooter = Shooter::new(profile);
    let count0 = shooter.count(0.0)?;
    report.negative_count = count0;
    let m = count0.min(k);
    let floor = 1.01 * profile.v_grid.iter().fold(0.0f64, |a, v| a.min(*v)) - 1e-12;
    if m > 0 && shooter.count(floor)? > 0 {
        return Err(SpectrumError::Isolation { index: 0, detail: format!("eigenvalue below the sampled minimum {floor} of V") });
    }

    // Bracket i is [lo_i, hi_i] with count(lo_i) <= i < count(hi_i); the
    // upper end of bracket i-1 can tighten the lower end of bracket i.
    let mut lower = floor;
    for index in 0..m {
        let (mut lo, mut hi) = (lower, 0.0);
        let (mut c_lo, mut c_hi) = (shooter.count(lo)?, count0);
        while !(c_lo == index && c_hi == index + 1) {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                return Err(SpectrumError::Isolation { index, detail: format!("count bisection collapsed at {mid}") });
            }
            let c = shooter.count(mid)?;
            if c > index {
                hi = mid;
                c_hi = c;
            } else {
                lo = mid;
                c_lo = c;
            }
        }
        lower = hi;
        let x_m = shooter.matching_point(0.5 * (lo + hi));
        let f_lo = shooter.mismatch(lo, index, x_m)?;
        let f_hi = shooter.mismatch(hi, index, x_m)?;
        if !(f_lo < 0.0 && f_hi > 0.0) {
            return Err(SpectrumError::Isolation {
                index,
                detail: format!("Wronskian mismatch does not change sign on [{lo}, {hi}] ({f_lo}, {f_hi})"),
            });
        }
        loop {
            let mid = 0.5 * (lo + hi);
            if hi - lo <= 1e-14 * mid.abs() || mid <= lo || mid >= hi {
                break;
            }
            let f = shooter.mismatch(mid, index, x_m)?;
            if f < 0.0 {
                lo = mid;
            } else if f > 0.0 {
                hi = mid;
            } else {
                lo = mid;
                hi = mid;
            }
        }
        let mu = 0.5 * (lo + hi);
        report.eigenvalues.push(mu);
        report.growth_rates.push((-mu).sqrt());
        report.error_estimates.push(0.5 * (hi - lo));
        report.grid_eigenvalues.push(mu);
        report.eigenfunctions.push(shooter.eigenfunction(mu, index, x_m)?);
        report.residuals.push(shooter.mismatch(mu, index, x_m)?.abs());
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectrum::potential::{SquareWell, ZeroPotential};
    use std::sync::Arc;

    #[test]
    fn zero_potential_is_empty() {
        let p = PotentialProfile::sample(Arc::new(ZeroPotential), (-20.0, 20.0), 101).unwrap();
        assert!(eigen_shooting(&p, 2).unwrap().is_empty());
    }

    #[test]
    fn square_well_matches_transcendental_root() {
        let well = SquareWell { depth: 1.0, half_width: 1.0 };
        let p = PotentialProfile::sample(Arc::new(well), (-30.0, 30.0), 601).unwrap();
        let r = eigen_shooting(&p, 3).unwrap();
        assert_eq!(r.len(), 1);
        // √(1−|E|)·tan√(1−|E|) = √|E| at E ≈ −0.45375.
        let e = -r.eigenvalues[0];
        let k = (1.0 - e).sqrt();
        assert!((k * k.tan() - e.sqrt()).abs() < 1e-9);
    }
}
