//! Method-of-lines right-hand side, RK4 stepping and the evolution driver.

use serde::{Deserialize, Serialize};

use super::energy::{energy, EnergyReport};
use super::state::FieldState;
use super::{EvolutionError, Mode, DEFAULT_CFL, OVERFLOW_GUARD};

/// Time derivative (u̇, π̇) of `state`.
pub fn rhs(state: &FieldState, mode: Mode) -> (Vec<f64>, Vec<f64>) {
    let n = state.u.len();
    let mut du = vec![0.0; n];
    let mut dpi = vec![0.0; n];
    rhs_into(state, &state.u, &state.pi, mode, &mut du, &mut dpi);
    (du, dpi)
}

fn rhs_into(state: &FieldState, u: &[f64], pi: &[f64], mode: Mode, du: &mut [f64], dpi: &mut [f64]) {
    let g = &state.grid;
    let n = u.len();
    let h = g.h;
    let inv_h2 = 1.0 / (h * h);
    du[1..n - 1].copy_from_slice(&pi[1..n - 1]);
    for i in 1..n - 1 {
        let lap = (u[i + 1] - 2.0 * u[i] + u[i - 1]) * inv_h2;
        let mut force = g.v[i] * u[i];
        if mode == Mode::Nonlinear {
            force += g.p[i] * u[i] * u[i] * (u[i] + 3.0 * g.w_bg[i]);
        }
        dpi[i] = lap - force;
    }
    // Sommerfeld rows with second-order one-sided differences.
    let inv_2h = 0.5 / h;
    let left = |f: &[f64]| (-3.0 * f[0] + 4.0 * f[1] - f[2]) * inv_2h;
    let right = |f: &[f64]| (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) * inv_2h;
    du[0] = left(u);
    dpi[0] = left(pi);
    du[n - 1] = -right(u);
    dpi[n - 1] = -right(pi);
}

/// One classical RK4 step of size `dt`.
pub fn step(state: &FieldState, dt: f64, mode: Mode) -> Result<FieldState, EvolutionError> {
    let n = state.u.len();
    let mut k = [(); 4].map(|_| (vec![0.0; n], vec![0.0; n]));
    let mut u_stage = vec![0.0; n];
    let mut pi_stage = vec![0.0; n];
    let weights = [0.5 * dt, 0.5 * dt, dt];
    for s in 0..4 {
        if s == 0 {
            u_stage.copy_from_slice(&state.u);
            pi_stage.copy_from_slice(&state.pi);
        } else {
            let c = weights[s - 1];
            let (ku, kp) = &k[s - 1];
            for i in 0..n {
                u_stage[i] = state.u[i] + c * ku[i];
                pi_stage[i] = state.pi[i] + c * kp[i];
            }
        }
        let (ku, kp) = &mut k[s];
        rhs_into(state, &u_stage, &pi_stage, mode, ku, kp);
    }
    let sixth = dt / 6.0;
    let mut next = state.clone();
    next.t = state.t + dt;
    for i in 0..n {
        next.u[i] += sixth * (k[0].0[i] + 2.0 * k[1].0[i] + 2.0 * k[2].0[i] + k[3].0[i]);
        next.pi[i] += sixth * (k[0].1[i] + 2.0 * k[1].1[i] + 2.0 * k[2].1[i] + k[3].1[i]);
    }
    if next.u.iter().chain(&next.pi).any(|v| !v.is_finite()) {
        return Err(EvolutionError::NonFinite { last_valid_t: state.t });
    }
    Ok(next)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvolveConfig {
    pub t_max: f64,
    pub mode: Mode,
    pub cfl: f64,
    /// Explicit time step; `None` uses cfl × h.
    pub dt: Option<f64>,
    /// Sampling interval of the energy series.
    pub probe_interval: f64,
    /// Stop once max|u| exceeds this value.
    pub saturation: Option<f64>,
    pub overflow_guard: f64,
    /// Times at which (x, u, π) snapshots are stored.
    pub snapshot_times: Vec<f64>,
}

impl Default for EvolveConfig {
    fn default() -> Self {
        Self {
            t_max: 100.0,
            mode: Mode::Nonlinear,
            cfl: DEFAULT_CFL,
            dt: None,
            probe_interval: 0.5,
            saturation: None,
            overflow_guard: OVERFLOW_GUARD,
            snapshot_times: Vec::new(),
        }
    }
}

/// Why a run ended.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Termination {
    Completed,
    Saturated { t: f64 },
    Overflow { t: f64 },
    NonFinite { t: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub t: f64,
    pub u: Vec<f64>,
    pub pi: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct EvolutionRun {
    pub series: Vec<EnergyReport>,
    pub snapshots: Vec<Snapshot>,
    pub termination: Termination,
    pub dt: f64,
    pub final_state: FieldState,
}

/// Evolves `initial` to `t_max`, sampling the energy series every
/// `probe_interval` (rounded to a whole number of steps).
pub fn evolve(initial: &FieldState, cfg: &EvolveConfig) -> Result<EvolutionRun, EvolutionError> {
    let h = initial.grid.h;
    if !(cfg.cfl > 0.0) || !(cfg.t_max >= 0.0) || !(cfg.probe_interval > 0.0) {
        return Err(EvolutionError::InvalidConfig(format!(
            "cfl {}, t_max {}, probe interval {}",
            cfg.cfl, cfg.t_max, cfg.probe_interval
        )));
    }
    let limit = DEFAULT_CFL.max(cfg.cfl) * h;
    let dt = cfg.dt.unwrap_or(cfg.cfl * h);
    if !(dt > 0.0) || dt > limit * (1.0 + 1e-12) || cfg.cfl > DEFAULT_CFL * (1.0 + 1e-12) {
        return Err(EvolutionError::Cfl { dt, cfl: DEFAULT_CFL, limit: DEFAULT_CFL * h });
    }
    let steps = (cfg.t_max / dt).ceil() as usize;
    let dt = if steps > 0 { cfg.t_max / steps as f64 } else { dt };
    let probe_every = ((cfg.probe_interval / dt).round() as usize).max(1);
    let mut snapshot_steps: Vec<(usize, f64)> =
        cfg.snapshot_times.iter().filter(|t| **t >= 0.0 && **t <= cfg.t_max).map(|t| ((t / dt).round() as usize, *t)).collect();
    snapshot_steps.sort_by_key(|s| s.0);

    let mut state = initial.clone();
    state.t = initial.t;
    let mut series = vec![energy(&state)];
    let mut snapshots = Vec::new();
    let mut next_snapshot = 0;
    let mut termination = Termination::Completed;
    let take_snapshots = |k: usize, s: &FieldState, out: &mut Vec<Snapshot>, next: &mut usize| {
        while *next < snapshot_steps.len() && snapshot_steps[*next].0 == k {
            out.push(Snapshot { t: s.t, u: s.u.clone(), pi: s.pi.clone() });
            *next += 1;
        }
    };
    take_snapshots(0, &state, &mut snapshots, &mut next_snapshot);
    for k in 1..=steps {
        let next = match step(&state, dt, cfg.mode) {
            Ok(s) => s,
            Err(EvolutionError::NonFinite { last_valid_t }) => {
                termination = Termination::NonFinite { t: last_valid_t };
                break;
            }
            Err(e) => return Err(e),
        };
        state = next;
        state.t = initial.t + k as f64 * dt;
        take_snapshots(k, &state, &mut snapshots, &mut next_snapshot);
        let overflow = state.u.iter().zip(&state.grid.w_bg).any(|(u, w)| (u + w).abs() > 1.0 + cfg.overflow_guard);
        let saturated = cfg.saturation.is_some_and(|s| state.max_abs_u() > s);
        if k % probe_every == 0 || k == steps || overflow || saturated {
            series.push(energy(&state));
        }
        if overflow {
            termination = Termination::Overflow { t: state.t };
            break;
        }
        if saturated {
            termination = Termination::Saturated { t: state.t };
            break;
        }
    }
    Ok(EvolutionRun { series, snapshots, termination, dt, final_state: state })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evolution::state::{gaussian_pulse, EvolutionGrid, PulseDirection};
    use crate::spectrum::Background;
    use std::f64::consts::PI;
    use std::sync::Arc;

    fn vacuum(n: usize) -> Arc<EvolutionGrid> {
        Arc::new(EvolutionGrid::new(&Background::Constant(1.0), (-100.0, 300.0), n).unwrap())
    }

    #[test]
    fn zero_state_is_fixed() {
        let g = vacuum(513);
        let s = FieldState::zero(g);
        let (du, dpi) = rhs(&s, Mode::Nonlinear);
        assert!(du.iter().chain(&dpi).all(|v| *v == 0.0));
        let next = step(&s, 0.1, Mode::Nonlinear).unwrap();
        assert_eq!(next.u, s.u);
    }

    #[test]
    fn vacuum_linear_term_is_two_p() {
        let g = vacuum(513);
        let u: Vec<f64> = g.x.iter().map(|x| 1e-6 * (-(x - 2.0f64).powi(2)).exp()).collect();
        let s = FieldState::new(g.clone(), u.clone(), vec![0.0; u.len()]).unwrap();
        let (_, dpi) = rhs(&s, Mode::Linear);
        for i in 1..u.len() - 1 {
            let lap = (u[i + 1] - 2.0 * u[i] + u[i - 1]) / (g.h * g.h);
            assert!((dpi[i] - (lap - 2.0 * g.p[i] * u[i])).abs() <= 1e-15 * (1.0 + lap.abs()));
        }
    }

    #[test]
    fn standing_sine_mode_period() {
        // On [2000, 2010] the potential 2P is below 10⁻⁶ and the ends are
        // held at zero.
        let g = Arc::new(EvolutionGrid::new(&Background::Constant(1.0), (2000.0, 2010.0), 201).unwrap());
        let len = 10.0;
        let k = PI / len;
        let u: Vec<f64> = g.x.iter().map(|x| (k * (x - 2000.0)).sin()).collect();
        let s = FieldState::new(g.clone(), u.clone(), vec![0.0; u.len()]).unwrap();
        // Half period: u → −u.
        let half = PI / k;
        let steps = 800;
        let dt = half / steps as f64;
        let mut st = s;
        for _ in 0..steps {
            st = step(&st, dt, Mode::Linear).unwrap();
            st.u[0] = 0.0;
            st.pi[0] = 0.0;
            let n = st.u.len();
            st.u[n - 1] = 0.0;
            st.pi[n - 1] = 0.0;
        }
        let err = st.u.iter().zip(&u).map(|(a, b)| (a + b).abs()).fold(0.0, f64::max);
        // Discrete frequency differs from k by O(h²): k h²/24 · k t.
        assert!(err < 2e-3, "{err}");
    }

    #[test]
    fn outgoing_pulse_leaves_through_boundary() {
        let g = vacuum(4096);
        let s = gaussian_pulse(g, 250.0, 5.0, 1e-3, PulseDirection::Right).unwrap();
        let cfg = EvolveConfig { t_max: 100.0, ..EvolveConfig::default() };
        let run = evolve(&s, &cfg).unwrap();
        let e0 = run.series[0].total;
        let e1 = run.series.last().unwrap().total;
        assert!(e1 <= 1e-3 * e0, "{e1} / {e0}");
    }

    #[test]
    fn cfl_violation_is_rejected() {
        let g = vacuum(513);
        let s = FieldState::zero(g.clone());
        let cfg = EvolveConfig { dt: Some(0.9 * g.h), ..EvolveConfig::default() };
        assert!(matches!(evolve(&s, &cfg), Err(EvolutionError::Cfl { .. })));
    }
}
