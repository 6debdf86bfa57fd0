//! A computed stationary solution with a C² evaluator on [1, ∞).

use serde::{Deserialize, Serialize};

use super::closed_form::AsymptoticSeries;
use super::seed::HorizonSeed;
use super::shoot::second_derivative;
use super::StationaryError;
use crate::geometry::rho_of_x;
use crate::numerics::QuinticHermite;

/// Behaviour of the profile beyond its last knot.
#[derive(Debug, Clone, PartialEq)]
pub enum Tail {
    /// Large-r series about the limit ±1.
    Series(AsymptoticSeries),
    /// Constant continuation.
    Constant(f64),
}

/// One shot performed during a search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShotRecord {
    pub a: f64,
    pub classification: String,
    pub zero_count: usize,
    pub eventual_zero_count: usize,
    pub prufer_count: usize,
    pub sign_scan_count: usize,
    pub r_end: f64,
}

/// Stationary solution Wₙ sampled on knots ρ = r − 1 with values W, W′ and
/// the equation's W″, interpolated by quintic Hermite pieces in ρ.
#[derive(Debug, Clone)]
pub struct StationaryProfile {
    pub n: usize,
    pub a_n: f64,
    pub delta: f64,
    pub limit_sign: f64,
    pub rho: Vec<f64>,
    pub w: Vec<f64>,
    pub wp: Vec<f64>,
    pub tail: Tail,
    /// Max of |r(r−1)W″ + W′ + W(1−W²)| at off-knot radii.
    pub residual_norm: f64,
    /// Largest radius covered by integrated data.
    pub r_trust: f64,
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Final bisection bracket in a, when the profile came from a search.
    pub bracket: Option<(f64, f64)>,
    /// Matching radius between the outward and inward segments.
    pub r_match: Option<f64>,
    pub classification_log: Vec<ShotRecord>,
    seed: HorizonSeed,
    interp: QuinticHermite,
}

impl StationaryProfile {
    /// Builds the evaluator from knot data. W″ at each knot is taken from the
    /// stationary equation, so the samples must come from a solution.
    pub fn from_samples(
        n: usize,
        a_n: f64,
        delta: f64,
        rho: Vec<f64>,
        w: Vec<f64>,
        wp: Vec<f64>,
        tail: Tail,
    ) -> Result<Self, StationaryError> {
        if rho.is_empty() || rho[0] <= 0.0 {
            return Err(StationaryError::Domain("profile knots must satisfy r > 1".into()));
        }
        if w.iter().chain(&wp).any(|v| !v.is_finite()) {
            return Err(StationaryError::Domain("non-finite profile sample".into()));
        }
        let seed = HorizonSeed::new(a_n.clamp(0.0, 1.0), delta.clamp(f64::MIN_POSITIVE, super::seed::MAX_DELTA))?;
        let d2: Vec<f64> = rho.iter().zip(w.iter().zip(&wp)).map(|(p, (v, d))| second_derivative(*p, *v, *d)).collect();
        let (rho_k, w_k, wp_k, d2_k) = if rho.len() == 1 {
            let p = rho[0];
            (vec![p, 2.0 * p], vec![w[0]; 2], vec![wp[0]; 2], vec![d2[0]; 2])
        } else {
            (rho.clone(), w.clone(), wp.clone(), d2)
        };
        let interp = QuinticHermite::new(rho_k, w_k, wp_k, d2_k)
            .map_err(|e| StationaryError::Domain(format!("profile knots: {e}")))?;
        let r_trust = 1.0 + rho[rho.len() - 1];
        let limit_sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        let mut profile = Self {
            n,
            a_n,
            delta,
            limit_sign,
            rho,
            w,
            wp,
            tail,
            residual_norm: 0.0,
            r_trust,
            rel_tol: 0.0,
            abs_tol: 0.0,
            bracket: None,
            r_match: None,
            classification_log: Vec::new(),
            seed,
            interp,
        };
        profile.residual_norm = profile.ode_residual(1000);
        Ok(profile)
    }

    /// W ≡ value on r > 1 (the vacuum for value = ±1).
    pub fn constant(value: f64) -> Result<Self, StationaryError> {
        let n = 0;
        let rho: Vec<f64> = (0..=12).map(|k| 10f64.powi(k - 6)).collect();
        let len = rho.len();
        let mut p = Self::from_samples(n, value.abs().min(1.0), 1e-6, rho, vec![value; len], vec![0.0; len], Tail::Constant(value))?;
        p.limit_sign = value.signum();
        Ok(p)
    }

    pub fn radii(&self) -> Vec<f64> {
        self.rho.iter().map(|p| 1.0 + p).collect()
    }

    /// (W, W′, W″) at ρ = r − 1 ≥ 0.
    pub fn eval_rho(&self, rho: f64) -> [f64; 3] {
        let first = self.rho[0];
        let last = self.rho[self.rho.len() - 1];
        if rho < first {
            if (self.w[0] - self.seed.start().0).abs() <= 1e-6 && self.wp[0].is_finite() {
                let (v, d) = self.seed.eval(rho.max(0.0));
                return [v, d, self.seed.second_derivative()];
            }
            return [self.w[0], 0.0, 0.0];
        }
        if rho > last {
            return match &self.tail {
                Tail::Series(s) => s.eval(1.0 + rho),
                Tail::Constant(v) => [*v, 0.0, 0.0],
            };
        }
        self.interp.eval_all(rho)
    }

    /// (W, W′, W″) at radius r.
    pub fn eval(&self, r: f64) -> [f64; 3] {
        self.eval_rho(r - 1.0)
    }

    /// W at tortoise coordinate x.
    pub fn w_at_x(&self, x: f64) -> f64 {
        self.eval_rho(rho_of_x(x))[0]
    }

    /// Number of sign changes of W across the knots.
    pub fn zero_count(&self) -> usize {
        super::shoot::sign_scan_zero_count(&self.w)
    }

    /// Max scaled residual r(r−1)W″ + W′ + W(1−W²) at `count` radii placed
    /// between knots.
    pub fn ode_residual(&self, count: usize) -> f64 {
        let m = self.rho.len();
        if m < 2 {
            return 0.0;
        }
        let mut worst = 0.0f64;
        for j in 0..count {
            // Spread over knot intervals, at irrational fractions inside each.
            let pos = (j as f64 + 0.5) / count as f64 * (m - 1) as f64;
            let i = (pos.floor() as usize).min(m - 2);
            let frac = 0.382 + 0.236 * pos.fract();
            let rho = self.rho[i] + frac * (self.rho[i + 1] - self.rho[i]);
            let [w, wp, wpp] = self.eval_rho(rho);
            let res = rho * (1.0 + rho) * wpp + wp + w * (1.0 - w * w);
            worst = worst.max(res.abs());
        }
        worst
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stationary::closed_form::{a1_exact, w1_closed_form, w1_closed_form_derivative, w1_zero};

    fn closed_form_profile(count: usize) -> StationaryProfile {
        let rho: Vec<f64> = (0..count).map(|i| 1e-6 * 1e10f64.powf(i as f64 / (count - 1) as f64)).collect();
        let w = rho.iter().map(|p| w1_closed_form(1.0 + p)).collect();
        let wp = rho.iter().map(|p| w1_closed_form_derivative(1.0 + p)).collect();
        let c = w1_zero();
        let tail = Tail::Series(AsymptoticSeries::for_radius(-1.0, 4.0 * c - 3.0, 1e4));
        StationaryProfile::from_samples(1, a1_exact(), 1e-6, rho, w, wp, tail).unwrap()
    }

    #[test]
    fn evaluator_reproduces_closed_form() {
        let p = closed_form_profile(1500);
        assert!(p.residual_norm < 1e-6, "{}", p.residual_norm);
        for r in [1.0, 1.0 + 1e-9, 1.3, 2.7, 55.0, 9e3, 1e5, 1e7] {
            assert!((p.eval(r)[0] - w1_closed_form(r)).abs() < 1e-9, "r={r}");
        }
        assert_eq!(p.zero_count(), 1);
        assert!(p.w_at_x(-30.0) > 0.26);
    }

    #[test]
    fn constant_profiles() {
        let p = StationaryProfile::constant(1.0).unwrap();
        for r in [1.0, 1.5, 1e3, 1e9] {
            assert_eq!(p.eval(r), [1.0, 0.0, 0.0]);
        }
        assert_eq!(p.residual_norm, 0.0);
        let z = StationaryProfile::constant(0.0).unwrap();
        assert_eq!(z.eval(4.0)[0], 0.0);
    }
}
