//! Property checks on computed stationary profiles.

use serde::{Deserialize, Serialize};

use super::closed_form::{a1_exact, envelope_q, hamiltonian_h, w1_closed_form};
use super::profile::StationaryProfile;
use super::search::{config_for, integrate_outward};
use super::shoot::{prufer_zero_count, shoot};
use super::{StationaryConfig, StationaryError};

/// One named check with its measured value and bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    /// The mathematical statement being tested.
    pub anchor: String,
    pub measured: f64,
    pub bound: f64,
    pub pass: bool,
    /// Reported but excluded from the overall verdict.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub advisory: bool,
}

impl Check {
    pub fn advisory(mut self) -> Self {
        self.advisory = true;
        self
    }

    pub fn at_most(name: &str, anchor: &str, measured: f64, bound: f64) -> Self {
        Self { name: name.into(), anchor: anchor.into(), measured, bound, pass: measured <= bound, advisory: false }
    }

    pub fn at_least(name: &str, anchor: &str, measured: f64, bound: f64) -> Self {
        Self { name: name.into(), anchor: anchor.into(), measured, bound, pass: measured >= bound, advisory: false }
    }

    pub fn equal(name: &str, anchor: &str, measured: f64, expected: f64) -> Self {
        Self { name: name.into(), anchor: anchor.into(), measured, bound: expected, pass: measured == expected, advisory: false }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PropertyReport {
    pub checks: Vec<Check>,
}

impl PropertyReport {
    /// True when every non-advisory check passes.
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass || c.advisory)
    }

    /// Failed non-advisory checks.
    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass && !c.advisory)
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn extend(&mut self, other: PropertyReport) {
        self.checks.extend(other.checks);
    }
}

/// Knots plus midpoints, as (r, W, W′).
fn dense_samples(p: &StationaryProfile) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let mut r = Vec::with_capacity(2 * p.rho.len());
    let mut w = Vec::with_capacity(2 * p.rho.len());
    let mut wp = Vec::with_capacity(2 * p.rho.len());
    for i in 0..p.rho.len() {
        r.push(1.0 + p.rho[i]);
        w.push(p.w[i]);
        wp.push(p.wp[i]);
        if i + 1 < p.rho.len() {
            let rho = 0.5 * (p.rho[i] + p.rho[i + 1]);
            let [v, d, _] = p.eval_rho(rho);
            r.push(1.0 + rho);
            w.push(v);
            wp.push(d);
        }
    }
    (r, w, wp)
}

/// Checks that need only the profile data.
pub fn validate_profile(p: &StationaryProfile) -> PropertyReport {
    let mut rep = PropertyReport::default();
    let n = p.n as f64;
    let (r, w, wp) = dense_samples(p);

    rep.checks.push(Check::equal("zero_count", "W_n has exactly n zeros", super::shoot::sign_scan_zero_count(&w) as f64, n));
    let prufer = prufer_zero_count(&r, &w, &wp).map(|c| c as f64).unwrap_or(f64::NAN);
    rep.checks.push(Check::equal("prufer_count", "Prüfer winding counts the zeros", prufer, n));

    let max_w = w.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    rep.checks.push(Check::at_most("bounded", "-1 <= W_n <= 1", max_w, 1.0));
    let max_wp = wp.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    rep.checks.push(Check::at_most("derivative_bound", "|W'| <= 1", max_wp, 1.0 + 1e-10));

    let mut bad_extrema = 0usize;
    for i in 1..w.len().saturating_sub(1) {
        let (l, c, rr) = (w[i - 1], w[i], w[i + 1]);
        if c < l.min(rr) && c > 0.0 {
            bad_extrema += 1;
        }
        if c > l.max(rr) && c < 0.0 {
            bad_extrema += 1;
        }
    }
    rep.checks.push(Check::equal(
        "extremum_rule",
        "no local minimum with W > 0 and no local maximum with W < 0",
        bad_extrema as f64,
        0.0,
    ));

    let envelope_excess = r
        .iter()
        .zip(&w)
        .filter(|(x, _)| **x >= 3.0)
        .map(|(x, v)| v.abs() - envelope_q(*x))
        .fold(f64::NEG_INFINITY, f64::max);
    rep.checks.push(Check::at_most("envelope", "|W(r)| <= Q(r) for r >= 3", envelope_excess, 1e-8));

    let mut min_dh = f64::INFINITY;
    for i in 0..r.len() - 1 {
        let in_region = |k: usize| r[k] >= 3.0 && w[k] * wp[k] <= 0.0;
        if in_region(i) && in_region(i + 1) {
            let dh = (hamiltonian_h(r[i + 1], w[i + 1], wp[i + 1]) - hamiltonian_h(r[i], w[i], wp[i])) / (r[i + 1] - r[i]);
            min_dh = min_dh.min(dh);
        }
    }
    if !min_dh.is_finite() {
        min_dh = 0.0;
    }
    rep.checks.push(Check::at_least("hamiltonian_monotone", "H' >= 0 where r >= 3 and W W' <= 0", min_dh, -1e-8));

    rep.checks.push(Check::at_most("ode_residual", "interpolant solves the stationary equation", p.residual_norm, 1e-6));

    let r_end = p.r_trust;
    let w_end = p.eval(r_end)[0];
    rep.checks.push(Check::at_least("limit_reached", "|W(r_end)| close to 1", w_end.abs(), 0.999));
    rep.checks.push(Check::equal("limit_sign", "W_n tends to (-1)^n", w_end.signum(), p.limit_sign));
    let decade: Vec<f64> = (0..=50).map(|k| p.eval(r_end * 10f64.powf(-1.0 + k as f64 / 50.0))[0].abs()).collect();
    let non_increasing = decade.windows(2).filter(|d| d[1] < d[0]).count();
    rep.checks.push(Check::equal("limit_monotone", "|W| increases over the last decade", non_increasing as f64, 0.0));

    rep.checks.push(Check::at_most("horizon_value", "a_n in (0, a_1]", p.a_n, a1_exact() + 1e-8));

    if p.n == 1 {
        rep.checks.push(Check::at_most("a1_exact", "a_1 = 2 - sqrt 3", (p.a_n - a1_exact()).abs(), 1e-8));
        let sup = (0..=20_000)
            .map(|k| {
                let r = 1e4f64.powf(k as f64 / 20_000.0);
                (p.eval(r)[0] - w1_closed_form(r)).abs()
            })
            .fold(0.0f64, f64::max);
        rep.checks.push(Check::at_most("closed_form_w1", "W_1 = (c - r)/(r + 3(c - 1))", sup, 1e-7));
    }

    let log_mismatch = p
        .classification_log
        .iter()
        .filter(|s| s.prufer_count != s.sign_scan_count || s.prufer_count != s.zero_count)
        .count();
    rep.checks.push(Check::equal("search_prufer_consistency", "Prüfer count equals sign-scan count on every shot", log_mismatch as f64, 0.0));
    rep
}

/// Checks that re-integrate from the horizon: δ-sensitivity and continuous
/// dependence on a.
pub fn validate_with_shots(p: &StationaryProfile, config: &StationaryConfig) -> Result<PropertyReport, StationaryError> {
    let mut rep = PropertyReport::default();
    let cfg = config_for(p.n, config);

    let w2 = |delta: f64| -> Result<f64, StationaryError> {
        let mut c = cfg.clone();
        c.delta = delta;
        Ok(integrate_outward(p.a_n, 1.0, &c)?.last_y()[0])
    };
    let sens = (w2(cfg.delta)? - w2(0.5 * cfg.delta)?).abs();
    rep.checks.push(Check::at_most("delta_sensitivity", "W(2) insensitive to halving the start offset", sens, 1e-9));

    // Continuous dependence on a. The bound over the whole |W| <= 1 - 1e-3
    // range is advisory. The bound out to r = 100 and linearity of the
    // deviation in the perturbation size are binding.
    let s0 = shoot(p.a_n, &cfg)?;
    let deviation = |eps: f64, r_cap: f64| -> Result<f64, StationaryError> {
        let s1 = shoot(p.a_n * (1.0 + eps), &cfg)?;
        let inside = |y: &[f64; 2]| y[0].abs() <= 1.0 - 1e-3;
        let mut sup = 0.0f64;
        for (rho, y) in s0.trajectory.t.iter().zip(&s0.trajectory.y) {
            if 1.0 + rho > r_cap {
                break;
            }
            let Some(y1) = s1.trajectory.eval(*rho) else { break };
            if !inside(y) || !inside(&y1) {
                break;
            }
            sup = sup.max((y[0] - y1[0]).abs());
        }
        Ok(sup)
    };
    let full = deviation(1e-9, f64::INFINITY)?;
    rep.checks.push(
        Check::at_most("continuity_full_range", "shots at a and a(1 + 1e-9) agree while |W| <= 1 - 1e-3", full, 1e-6).advisory(),
    );
    let near = deviation(1e-9, 100.0)?;
    rep.checks.push(Check::at_most("continuity", "shots at a and a(1 + 1e-9) agree on [1, 100]", near, 1e-6));
    let ratio = deviation(1e-6, 100.0)? / deviation(5e-7, 100.0)?;
    rep.checks.push(Check::at_most(
        "continuity_linear",
        "deviation scales linearly with the perturbation of a",
        (ratio - 2.0).abs(),
        0.02,
    ));
    Ok(rep)
}

/// Strict decrease of the horizon values along a sequence of profiles.
pub fn check_sequence(profiles: &[StationaryProfile]) -> Check {
    let violations = profiles.windows(2).filter(|w| !(w[1].a_n < w[0].a_n)).count();
    Check::equal("decreasing_sequence", "a_1 > a_2 > ... > a_n", violations as f64, 0.0)
}
