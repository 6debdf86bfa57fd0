//! Search for aₙ: bisection on the eventual zero count of horizon shots,
//! followed by a two-sided matching refinement that pins down (aₙ, c₁).

use log::{debug, info};

use super::closed_form::{a1_exact, AsymptoticSeries};
use super::profile::{ShotRecord, StationaryProfile, Tail};
use super::seed::HorizonSeed;
use super::shoot::{resample, shoot, sign_scan_zero_count, stationary_rhs, step_cap, prufer_zero_count, Classification, ShotOutcome};
use super::{StationaryConfig, StationaryError};
use crate::numerics::ode::{Direction, EventSpec, Integrator, Trajectory};
use crate::numerics::roots::bisect_by;

/// Outer radii grow by this factor per zero beyond the second, matching the
/// observed spacing of successive zeros.
const RADIUS_GROWTH_PER_ZERO: f64 = 40.0;

fn limit_sign(n: usize) -> f64 {
    if n % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Copy of `config` with r_max and r_far enlarged for n ≥ 4.
pub fn config_for(n: usize, config: &StationaryConfig) -> StationaryConfig {
    let mut c = config.clone();
    let scale = RADIUS_GROWTH_PER_ZERO.powi(n.saturating_sub(2) as i32);
    c.r_max *= scale;
    c.r_far *= scale;
    c
}

fn record(shot: &ShotOutcome) -> Result<ShotRecord, StationaryError> {
    let (r, w, wp) = resample(&shot.trajectory, 2);
    Ok(ShotRecord {
        a: shot.a,
        classification: shot.classification_kind().to_string(),
        zero_count: shot.zero_count,
        eventual_zero_count: shot.eventual_zero_count(),
        prufer_count: prufer_zero_count(&r, &w, &wp)?,
        sign_scan_count: sign_scan_zero_count(&w),
        r_end: 1.0 + shot.trajectory.last_t(),
    })
}

struct Logged<'a> {
    config: &'a StationaryConfig,
    log: Vec<ShotRecord>,
}

impl Logged<'_> {
    fn shoot(&mut self, a: f64) -> Result<ShotOutcome, StationaryError> {
        let s = shoot(a, self.config)?;
        self.log.push(record(&s)?);
        Ok(s)
    }
}

/// Bracket [lo, hi] around aₙ with eventual zero count n at hi and > n at
/// lo. `upper` must have eventual count ≤ n.
fn bracket(n: usize, upper: f64, shots: &mut Logged<'_>) -> Result<(f64, f64), StationaryError> {
    let hi_shot = shots.shoot(upper)?;
    if hi_shot.eventual_zero_count() > n {
        return Err(StationaryError::BracketNotFound {
            n,
            detail: format!("upper end a = {upper} already has {} zeros", hi_shot.eventual_zero_count()),
        });
    }
    let mut hi = upper;
    let mut lo = upper;
    for _ in 0..60 {
        lo *= 0.5;
        let s = shots.shoot(lo)?;
        if s.eventual_zero_count() > n {
            return Ok((lo, hi));
        }
        hi = lo;
    }
    let seen: Vec<String> = shots.log.iter().map(|r| format!("a={:.3e}:{}", r.a, r.eventual_zero_count)).collect();
    Err(StationaryError::BracketNotFound { n, detail: format!("scan exhausted; shots {}", seen.join(", ")) })
}

/// Regular solution from the horizon to ρ = `rho_end` (no events).
pub(crate) fn integrate_outward(a: f64, rho_end: f64, config: &StationaryConfig) -> Result<Trajectory<2>, StationaryError> {
    let seed = HorizonSeed::new(a, config.delta)?;
    let (w0, wp0) = seed.start();
    Integrator::new(config.integrator.clone())
        .step_cap(step_cap)
        .events(vec![
            EventSpec::new(|_, y: &[f64; 2]| y[0] - 1.0, Direction::Rising, true),
            EventSpec::new(|_, y: &[f64; 2]| y[0] + 1.0, Direction::Falling, true),
        ])
        .run(stationary_rhs, seed.delta, [w0, wp0], rho_end)
        .map_err(|source| StationaryError::Integration { a, r: source.location().map(|p| 1.0 + p), source })
        .and_then(|t| {
            if t.terminated_by.is_some() {
                Err(StationaryError::ResolutionLost {
                    n: 0,
                    detail: format!("outward integration for a = {a} left [-1, 1] at r = {}", 1.0 + t.last_t()),
                })
            } else {
                Ok(t)
            }
        })
}

/// Decaying solution from the series at r_far inward to ρ = `rho_end`.
fn integrate_inward(series: &AsymptoticSeries, r_far: f64, rho_end: f64, config: &StationaryConfig) -> Result<Trajectory<2>, StationaryError> {
    let [w, wp, _] = series.eval(r_far);
    let mut integrator = config.integrator.clone();
    integrator.initial_step = step_cap(r_far - 1.0);
    Integrator::new(integrator)
        .step_cap(step_cap)
        .run(stationary_rhs, r_far - 1.0, [w, wp], rho_end)
        .map_err(|source| StationaryError::Integration { a: f64::NAN, r: source.location().map(|p| 1.0 + p), source })
}

fn mismatch(a: f64, c1: f64, s: f64, rho_m: f64, config: &StationaryConfig) -> Result<[f64; 2], StationaryError> {
    let out = integrate_outward(a, rho_m, config)?;
    let series = AsymptoticSeries::for_radius(s, c1, config.r_far);
    let inw = integrate_inward(&series, config.r_far, rho_m, config)?;
    let (yo, yi) = (out.last_y(), inw.last_y());
    let r_m = 1.0 + rho_m;
    Ok([yo[0] - yi[0], r_m * (yo[1] - yi[1])])
}

/// Newton iteration on (a, c₁) for continuity of (W, rW′) at r_m.
fn refine_matching(n: usize, a0: f64, c0: f64, rho_m: f64, config: &StationaryConfig) -> Result<(f64, f64, f64), StationaryError> {
    let s = limit_sign(n);
    let (mut a, mut c1) = (a0, c0);
    let mut f = mismatch(a, c1, s, rho_m, config)?;
    for iter in 0..30 {
        let norm = f[0].abs().max(f[1].abs());
        debug!("matching n={n} iter={iter} a={a:.16e} c1={c1:.10e} |F|={norm:.3e}");
        if norm < 1e-13 {
            return Ok((a, c1, norm));
        }
        let da = 1e-7 * a;
        let dc = 1e-7 * c1.abs().max(1.0);
        let fa = mismatch(a + da, c1, s, rho_m, config)?;
        let fc = mismatch(a, c1 + dc, s, rho_m, config)?;
        let j = [[(fa[0] - f[0]) / da, (fc[0] - f[0]) / dc], [(fa[1] - f[1]) / da, (fc[1] - f[1]) / dc]];
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        if det == 0.0 || !det.is_finite() {
            break;
        }
        let step_a = (j[1][1] * f[0] - j[0][1] * f[1]) / det;
        let step_c = (-j[1][0] * f[0] + j[0][0] * f[1]) / det;
        // Damped update: halve until the mismatch decreases.
        let mut lambda = 1.0;
        loop {
            let (na, nc) = (a - lambda * step_a, c1 - lambda * step_c);
            if na > 0.0 && na < 1.0 {
                if let Ok(nf) = mismatch(na, nc, s, rho_m, config) {
                    if nf[0].abs().max(nf[1].abs()) < norm || lambda < 1e-3 {
                        a = na;
                        c1 = nc;
                        f = nf;
                        break;
                    }
                }
            }
            lambda *= 0.5;
            if lambda < 1e-4 {
                return Err(StationaryError::ResolutionLost { n, detail: format!("matching stalled at |F| = {norm:.3e}") });
            }
        }
        if lambda * step_a.abs() <= 1e-17 && lambda * step_c.abs() <= 1e-15 * c1.abs().max(1.0) {
            let norm = f[0].abs().max(f[1].abs());
            return Ok((a, c1, norm));
        }
    }
    let norm = f[0].abs().max(f[1].abs());
    if norm < 1e-10 {
        Ok((a, c1, norm))
    } else {
        Err(StationaryError::ResolutionLost { n, detail: format!("matching did not converge, |F| = {norm:.3e}") })
    }
}

/// Matching radius: first radius after the n-th zero where |W| ≥ 1/2.
fn matching_rho(n: usize, shot: &ShotOutcome) -> Option<f64> {
    let last_zero = *shot.zero_locations.get(n - 1)?;
    let traj = &shot.trajectory;
    traj.t.iter().zip(&traj.y).find(|(rho, y)| 1.0 + **rho > last_zero && y[0].abs() >= 0.5).map(|(rho, _)| *rho)
}

/// Initial c₁ from the two bracket shots averaged at a radius well inside
/// their common range, inverted through the series.
fn initial_c1(n: usize, lo: &ShotOutcome, hi: &ShotOutcome, config: &StationaryConfig) -> f64 {
    let s = limit_sign(n);
    let end = |sh: &ShotOutcome| match sh.classification {
        Classification::Crashed { r_a, .. } => r_a,
        Classification::Settled { r_settle, .. } => r_settle,
        Classification::Undecided { r_reached } => r_reached,
    };
    let last_zero = hi.zero_locations.last().copied().unwrap_or(2.0);
    let r_g = (end(lo).min(end(hi)) / 10.0).max(4.0 * last_zero);
    let w_lo = lo.trajectory.eval(r_g - 1.0).map(|y| y[0]);
    let w_hi = hi.trajectory.eval(r_g - 1.0).map(|y| y[0]);
    let w = match (w_lo, w_hi) {
        (Some(a), Some(b)) => 0.5 * (a + b),
        (Some(a), None) | (None, Some(a)) => a,
        (None, None) => return 0.0,
    };
    // Secant on the series value at r_g.
    let f = |c: f64| AsymptoticSeries::for_radius(s, c, r_g).eval(r_g)[0] - w;
    let (mut c_prev, mut c) = (r_g * (w - s), r_g * (w - s) * 1.01);
    let (mut f_prev, mut fc) = (f(c_prev), f(c));
    for _ in 0..50 {
        if fc == f_prev || !fc.is_finite() {
            break;
        }
        let next = c - fc * (c - c_prev) / (fc - f_prev);
        c_prev = c;
        f_prev = fc;
        c = next;
        fc = f(c);
        if fc.abs() < 1e-15 {
            break;
        }
    }
    let _ = config;
    if c.is_finite() {
        c
    } else {
        r_g * (w - s)
    }
}

/// Profile Wₙ with upper bracket end `upper` (a value with at most n
/// eventual zeros, e.g. just below a_{n−1}).
pub fn find_a_n_below(n: usize, upper: f64, config: &StationaryConfig) -> Result<StationaryProfile, StationaryError> {
    if n == 0 {
        return Err(StationaryError::Domain("n must be at least 1".into()));
    }
    config.validate()?;
    let cfg = config_for(n, config);
    let mut shots = Logged { config: &cfg, log: Vec::new() };

    let (lo0, hi0) = if n == 1 {
        // Seed analytically around the exact a₁, falling back to a scan.
        let a1 = a1_exact();
        let (lo, hi) = (a1 * (1.0 - 1e-6), a1 * (1.0 + 1e-6));
        let ok_hi = shots.shoot(hi)?.eventual_zero_count() <= 1;
        let ok_lo = shots.shoot(lo)?.eventual_zero_count() > 1;
        if ok_hi && ok_lo {
            (lo, hi)
        } else {
            bracket(n, upper, &mut shots)?
        }
    } else {
        bracket(n, upper, &mut shots)?
    };

    let mut failure = None;
    let br = bisect_by(
        |a| match shots.shoot(a) {
            Ok(s) => s.eventual_zero_count() <= n,
            Err(e) => {
                failure.get_or_insert(e);
                false
            }
        },
        lo0,
        hi0,
        cfg.bisection_tol,
    )
    .map_err(|e| StationaryError::BracketNotFound { n, detail: e.to_string() })?;
    if let Some(e) = failure {
        return Err(e);
    }
    info!("n={n}: bisection bracket [{:.16e}, {:.16e}]", br.lo, br.hi);

    let hi_shot = shoot(br.hi, &cfg)?;
    let lo_shot = shoot(br.lo, &cfg)?;
    if hi_shot.zero_count != n {
        return Err(StationaryError::ResolutionLost {
            n,
            detail: format!("upper bracket shot has {} zeros", hi_shot.zero_count),
        });
    }
    let rho_m = matching_rho(n, &hi_shot).ok_or_else(|| StationaryError::ResolutionLost {
        n,
        detail: "upper bracket shot never reaches |W| = 1/2 after its last zero".into(),
    })?;
    let c0 = initial_c1(n, &lo_shot, &hi_shot, &cfg);
    let (a, c1, norm) = refine_matching(n, br.midpoint(), c0, rho_m, &cfg)?;
    info!("n={n}: matched a={a:.16e} c1={c1:.10e} mismatch={norm:.2e} at r={:.4}", 1.0 + rho_m);

    let mut profile = assemble(n, a, c1, rho_m, &cfg)?;
    profile.bracket = Some((br.lo, br.hi));
    profile.classification_log = shots.log;
    Ok(profile)
}

fn assemble(n: usize, a: f64, c1: f64, rho_m: f64, cfg: &StationaryConfig) -> Result<StationaryProfile, StationaryError> {
    let s = limit_sign(n);
    let out = integrate_outward(a, rho_m, cfg)?;
    let series = AsymptoticSeries::for_radius(s, c1, cfg.r_far);
    let inw = integrate_inward(&series, cfg.r_far, rho_m, cfg)?;
    let mut rho = out.t.clone();
    let mut w: Vec<f64> = out.y.iter().map(|y| y[0]).collect();
    let mut wp: Vec<f64> = out.y.iter().map(|y| y[1]).collect();
    for (t, y) in inw.t.iter().zip(&inw.y).rev().skip(1) {
        rho.push(*t);
        w.push(y[0]);
        wp.push(y[1]);
    }
    let mut profile = StationaryProfile::from_samples(n, a, cfg.delta, rho, w, wp, Tail::Series(series))?;
    profile.rel_tol = cfg.rel_tol;
    profile.abs_tol = cfg.abs_tol;
    profile.r_match = Some(1.0 + rho_m);
    Ok(profile)
}

/// Profiles W₁, …, W_{n_max} found in sequence, each search bounded above
/// by the previous horizon value.
pub fn find_sequence(n_max: usize, config: &StationaryConfig) -> Result<Vec<StationaryProfile>, StationaryError> {
    let mut out: Vec<StationaryProfile> = Vec::with_capacity(n_max);
    let mut upper = 0.9;
    for n in 1..=n_max {
        let p = find_a_n_below(n, upper, config)?;
        upper = p.bracket.map(|b| b.0).unwrap_or(p.a_n) * (1.0 - 1e-9);
        out.push(p);
    }
    Ok(out)
}

/// Profile Wₙ.
pub fn find_a_n(n: usize, config: &StationaryConfig) -> Result<StationaryProfile, StationaryError> {
    find_sequence(n, config).map(|mut v| v.pop().expect("n >= 1"))
}
