//! Horizon shooting for the stationary equation
//! r(r − 1)W″ + W′ + W(1 − W²) = 0, integrated in ρ = r − 1.

use std::f64::consts::PI;

use super::seed::HorizonSeed;
use super::{StationaryConfig, StationaryError};
use crate::numerics::ode::{Direction, EventSpec, Integrator, Trajectory};

const EV_ZERO: usize = 0;
const EV_EXIT_UP: usize = 1;
const EV_EXIT_DOWN: usize = 2;
const EV_EXTREMUM: usize = 3;

/// Right-hand side in ρ for the state (W, W′).
pub fn stationary_rhs(rho: f64, y: &[f64; 2]) -> [f64; 2] {
    let [w, wp] = *y;
    [wp, -(wp + w * (1.0 - w * w)) / (rho * (1.0 + rho))]
}

/// W″ from the equation at (ρ, W, W′).
pub fn second_derivative(rho: f64, w: f64, wp: f64) -> f64 {
    stationary_rhs(rho, &[w, wp])[1]
}

/// Step cap in ρ: ρ/4 near the horizon and a fixed fraction of r farther
/// out so that dense output resolves every crossing.
pub fn step_cap(rho: f64) -> f64 {
    let rho = rho.abs();
    if rho < 0.1 {
        0.25 * rho
    } else {
        (0.025 * (1.0 + rho)).max(0.025)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Classification {
    /// |W| reached 1 at the finite radius `r_a`; `exit_sign` is sign(W) there.
    Crashed { r_a: f64, exit_sign: f64 },
    /// W turned back at |W| ≥ 1 − ε beyond the settle radius, having
    /// approached `limit_sign`. The solution then has exactly one further
    /// zero before it leaves [−1, 1].
    Settled { limit_sign: f64, r_settle: f64 },
    /// Reached r_max with |W| < 1 and no settle event.
    Undecided { r_reached: f64 },
}

/// A single shot from the horizon.
#[derive(Debug, Clone)]
pub struct ShotOutcome {
    pub a: f64,
    pub classification: Classification,
    pub zero_count: usize,
    pub zero_locations: Vec<f64>,
    /// Trajectory in ρ = r − 1 with state (W, W′).
    pub trajectory: Trajectory<2>,
}

impl ShotOutcome {
    pub fn radii(&self) -> Vec<f64> {
        self.trajectory.t.iter().map(|rho| 1.0 + rho).collect()
    }

    /// Number of zeros the full solution acquires before leaving [−1, 1].
    ///
    /// A crash ends the count. A settled shot turns back near ±1 and gains
    /// exactly one more zero. An undecided shot is extrapolated by the sign
    /// of d|W|/dr at r_max: growing |W| continues to the crash, shrinking |W|
    /// turns back.
    pub fn eventual_zero_count(&self) -> usize {
        match self.classification {
            Classification::Crashed { .. } => self.zero_count,
            Classification::Settled { .. } => self.zero_count + 1,
            Classification::Undecided { .. } => {
                let [w, wp] = self.trajectory.last_y();
                if w * wp > 0.0 {
                    self.zero_count
                } else {
                    self.zero_count + 1
                }
            }
        }
    }

    /// "crashed", "settled" or "undecided".
    pub fn classification_kind(&self) -> &'static str {
        match self.classification {
            Classification::Crashed { .. } => "crashed",
            Classification::Settled { .. } => "settled",
            Classification::Undecided { .. } => "undecided",
        }
    }

    /// Sign of W where the shot ended or turned back.
    pub fn final_sign(&self) -> f64 {
        match self.classification {
            Classification::Crashed { exit_sign, .. } => exit_sign,
            Classification::Settled { limit_sign, .. } => limit_sign,
            Classification::Undecided { .. } => self.trajectory.last_y()[0].signum(),
        }
    }
}

/// Integrates the regular solution with W(1) = a outward from 1 + δ.
pub fn shoot(a: f64, config: &StationaryConfig) -> Result<ShotOutcome, StationaryError> {
    if !(a > 0.0 && a < 1.0) {
        return Err(StationaryError::Domain(format!("shooting parameter a = {a} outside (0, 1)")));
    }
    config.validate()?;
    let seed = HorizonSeed::new(a, config.delta)?;
    let (w0, wp0) = seed.start();
    let eps = config.settle_eps;
    let r0 = config.settle_radius;
    let events = vec![
        EventSpec::new(|_, y: &[f64; 2]| y[0], Direction::Any, false),
        EventSpec::new(|_, y: &[f64; 2]| y[0] - 1.0, Direction::Rising, true),
        EventSpec::new(|_, y: &[f64; 2]| y[0] + 1.0, Direction::Falling, true),
        EventSpec::new(|_, y: &[f64; 2]| y[1], Direction::Any, false)
            .terminal_when(move |rho, y| 1.0 + rho >= r0 && y[0].abs() >= 1.0 - eps),
    ];
    let trajectory = Integrator::new(config.integrator.clone())
        .events(events)
        .step_cap(step_cap)
        .run(stationary_rhs, seed.delta, [w0, wp0], config.r_max - 1.0)
        .map_err(|source| StationaryError::Integration { a, r: source.location().map(|rho| 1.0 + rho), source })?;

    let zero_locations: Vec<f64> = trajectory.events_of(EV_ZERO).map(|e| 1.0 + e.t).collect();
    let classification = match trajectory.terminated_by {
        Some(EV_EXIT_UP) => Classification::Crashed { r_a: 1.0 + trajectory.last_t(), exit_sign: 1.0 },
        Some(EV_EXIT_DOWN) => Classification::Crashed { r_a: 1.0 + trajectory.last_t(), exit_sign: -1.0 },
        Some(EV_EXTREMUM) => Classification::Settled {
            limit_sign: trajectory.last_y()[0].signum(),
            r_settle: 1.0 + trajectory.last_t(),
        },
        _ => Classification::Undecided { r_reached: 1.0 + trajectory.last_t() },
    };
    Ok(ShotOutcome { a, classification, zero_count: zero_locations.len(), zero_locations, trajectory })
}

/// Zero count of W along sampled (r, W, W′) by the winding of the Prüfer
/// angle ψ = atan2(rW′, W): each zero is a decreasing passage of ψ through an
/// odd multiple of π/2.
pub fn prufer_zero_count(r: &[f64], w: &[f64], wp: &[f64]) -> Result<usize, StationaryError> {
    if r.len() != w.len() || r.len() != wp.len() {
        return Err(StationaryError::Domain("trajectory arrays differ in length".into()));
    }
    if r.is_empty() {
        return Ok(0);
    }
    let angle = |i: usize| -> Result<f64, StationaryError> {
        if w[i] == 0.0 && wp[i] == 0.0 {
            return Err(StationaryError::DegeneratePrufer { r: r[i] });
        }
        Ok((r[i] * wp[i]).atan2(w[i]))
    };
    let psi0 = angle(0)?;
    let mut psi = psi0;
    for i in 1..r.len() {
        let raw = angle(i)?;
        let mut d = raw - psi.rem_euclid(2.0 * PI);
        d = (d + PI).rem_euclid(2.0 * PI) - PI;
        psi += d;
    }
    let wind = |p: f64| ((p + 0.5 * PI) / PI).floor();
    Ok((wind(psi0) - wind(psi)).abs() as usize)
}

/// Independent zero count: strict sign changes of the sampled W.
pub fn sign_scan_zero_count(w: &[f64]) -> usize {
    let mut last = 0.0f64;
    let mut count = 0;
    for &v in w {
        if v != 0.0 {
            if last != 0.0 && v.signum() != last.signum() {
                count += 1;
            }
            last = v;
        }
    }
    count
}

/// Samples a trajectory at `factor` points per accepted step using its dense
/// output, returning (r, W, W′).
pub fn resample(trajectory: &Trajectory<2>, factor: usize) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let factor = factor.max(1);
    let mut r = vec![1.0 + trajectory.t[0]];
    let mut w = vec![trajectory.y[0][0]];
    let mut wp = vec![trajectory.y[0][1]];
    for seg in &trajectory.segments {
        for j in 1..=factor {
            let t = seg.t0 + seg.h * j as f64 / factor as f64;
            let y = seg.eval(t);
            r.push(1.0 + t);
            w.push(y[0]);
            wp.push(y[1]);
        }
    }
    (r, w, wp)
}
