//! Schwarzschild exterior in horizon units.
//!
//! All radii are measured in units of the horizon radius 2m, so the horizon
//! sits at r = 1 and the lapse is N = 1 − 1/r. A field W(t, r) given in
//! these units maps to mass m through W_m(t, r) = W(t / 2m, r / 2m).
//!
//! The tortoise coordinate is fixed as x = r + ln(r − 1), i.e. dx/dr = 1/N
//! with zero additive constant. Near the horizon the useful variable is
//! ρ = r − 1, which underflows to zero in `1 + ρ` long before ρ itself does;
//! functions with a `_rho` suffix take or return ρ directly.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
#[error("{quantity} requires {requirement}, got {value}")]
pub struct DomainError {
    pub quantity: &'static str,
    pub requirement: &'static str,
    pub value: f64,
}

fn outside_horizon(quantity: &'static str, r: f64) -> Result<(), DomainError> {
    if r > 1.0 && r.is_finite() {
        Ok(())
    } else {
        Err(DomainError { quantity, requirement: "r > 1", value: r })
    }
}

/// N = 1 − 1/r.
pub fn lapse(r: f64) -> Result<f64, DomainError> {
    outside_horizon("lapse", r)?;
    Ok(1.0 - 1.0 / r)
}

/// x = r + ln(r − 1).
pub fn tortoise_x(r: f64) -> Result<f64, DomainError> {
    outside_horizon("tortoise coordinate", r)?;
    Ok(r + (r - 1.0).ln())
}

/// x as a function of ρ = r − 1 > 0.
pub fn tortoise_x_rho(rho: f64) -> f64 {
    1.0 + rho + rho.ln()
}

/// ρ = r − 1 for a tortoise coordinate `x`: solves ρ + ln ρ = x − 1.
///
/// For x − 1 >= 1 Newton runs on the concave residual ρ + ln ρ − (x − 1)
/// from the lower bound max(1, y − ln y); for smaller x it runs in s = ln ρ
/// on the convex residual e^s + s − (x − 1) from the upper bound s = x − 1.
/// Both sequences are monotone, and the second keeps full relative accuracy
/// in ρ even where 1 + ρ rounds to 1.
pub fn rho_of_x(x: f64) -> f64 {
    let y = x - 1.0;
    if y.is_nan() {
        return f64::NAN;
    }
    if y.is_infinite() {
        return if y > 0.0 { f64::INFINITY } else { 0.0 };
    }
    if y >= 1.0 {
        let mut rho = (y - y.ln()).max(1.0);
        for _ in 0..100 {
            let next = rho - (rho + rho.ln() - y) / (1.0 + 1.0 / rho);
            if next <= rho {
                break;
            }
            rho = next;
        }
        rho
    } else {
        let mut s = y;
        for _ in 0..100 {
            let es = s.exp();
            let next = s - (es + s - y) / (es + 1.0);
            if next >= s {
                break;
            }
            s = next;
        }
        s.exp()
    }
}

/// Inverse of [`tortoise_x`]. Returns `r > 1` mathematically; for x below
/// about −36 the double `1 + ρ` rounds to 1, use [`rho_of_x`] there.
pub fn radius_r(x: f64) -> f64 {
    1.0 + rho_of_x(x)
}

/// P = (1 − 1/r) / r², the factor multiplying the nonlinearity.
pub fn potential_factor_p(r: f64) -> Result<f64, DomainError> {
    if !(r >= 1.0) || !r.is_finite() {
        return Err(DomainError { quantity: "P", requirement: "r >= 1", value: r });
    }
    Ok((1.0 - 1.0 / r) / (r * r))
}

/// P in terms of ρ = r − 1: ρ / (1 + ρ)³.
pub fn potential_factor_p_rho(rho: f64) -> f64 {
    let r = 1.0 + rho;
    rho / (r * r * r)
}

/// Maximum of P on r > 1, attained at r = 3/2.
pub const P_MAX: f64 = 4.0 / 27.0;

/// Immutable radial grid with tortoise coordinates and P.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialChart {
    pub r_min: f64,
    pub r_max: f64,
    pub n_points: usize,
    pub r_grid: Vec<f64>,
    pub rho_grid: Vec<f64>,
    pub x_grid: Vec<f64>,
    pub p_grid: Vec<f64>,
}

impl RadialChart {
    /// Default chart layout: log-spaced in r − 1 up to r = 10, log-spaced in r
    /// beyond, with points split in proportion to the decades covered.
    pub fn new(r_min: f64, r_max: f64, n_points: usize) -> Result<Self, DomainError> {
        outside_horizon("chart r_min", r_min)?;
        if !(r_max > r_min) || !r_max.is_finite() {
            return Err(DomainError { quantity: "chart r_max", requirement: "r_max > r_min", value: r_max });
        }
        if n_points < 2 {
            return Err(DomainError { quantity: "chart size", requirement: "n_points >= 2", value: n_points as f64 });
        }
        const SWITCH: f64 = 10.0;
        let near = if r_min < SWITCH { ((r_max.min(SWITCH) - 1.0) / (r_min - 1.0)).log10() } else { 0.0 };
        let far = if r_max > SWITCH { (r_max / r_min.max(SWITCH)).log10() } else { 0.0 };
        let total = near + far;
        let n_near = if far == 0.0 {
            n_points
        } else if near == 0.0 {
            0
        } else {
            ((n_points as f64 * near / total).round() as usize).clamp(2, n_points - 1)
        };
        let n_far = n_points - n_near;

        let mut rho = Vec::with_capacity(n_points);
        if n_near > 0 {
            let (a, b) = ((r_min - 1.0).ln(), (r_max.min(SWITCH) - 1.0).ln());
            let last = if n_far > 0 { n_near } else { n_near - 1 };
            for i in 0..n_near {
                rho.push((a + (b - a) * i as f64 / last as f64).exp());
            }
        }
        if n_far > 0 {
            let start = r_min.max(SWITCH);
            let (a, b) = (start.ln(), r_max.ln());
            let (first, denom) = if n_near > 0 { (0, n_far - 1) } else { (0, n_far - 1) };
            for i in first..n_far {
                let r = if denom == 0 { r_max } else { (a + (b - a) * i as f64 / denom as f64).exp() };
                rho.push(r - 1.0);
            }
        }
        rho.dedup_by(|b, a| *b <= *a);
        Ok(Self::from_rho(rho))
    }

    /// Chart on explicit radii offsets ρ = r − 1 (strictly increasing, > 0).
    pub fn from_rho(rho: Vec<f64>) -> Self {
        let r_grid: Vec<f64> = rho.iter().map(|p| 1.0 + p).collect();
        let x_grid = rho.iter().map(|p| tortoise_x_rho(*p)).collect();
        let p_grid = rho.iter().map(|p| potential_factor_p_rho(*p)).collect();
        Self {
            r_min: r_grid[0],
            r_max: *r_grid.last().expect("non-empty chart"),
            n_points: rho.len(),
            r_grid,
            rho_grid: rho,
            x_grid,
            p_grid,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn lapse_values() {
        assert_eq!(lapse(2.0).unwrap(), 0.5);
        assert_relative_eq!(lapse(10.0).unwrap(), 0.9, epsilon = 1e-15);
        let near = lapse(1.0 + 1e-12).unwrap();
        assert!(near > 0.0 && near < 1e-11);
        assert!(lapse(1.0).is_err());
        assert!(lapse(0.5).is_err());
    }

    #[test]
    fn tortoise_values() {
        assert_eq!(tortoise_x(2.0).unwrap(), 2.0);
        assert_relative_eq!(tortoise_x(1.5).unwrap(), 0.806_852_819_44, epsilon = 1e-11);
        assert_relative_eq!(tortoise_x(101.0).unwrap(), 105.605_170_19, epsilon = 1e-8);
        assert!(tortoise_x(1.0).is_err());
    }

    #[test]
    fn inverse_values() {
        assert_relative_eq!(radius_r(2.0), 2.0, epsilon = 1e-15);
        assert_relative_eq!(radius_r(0.806_852_819_44), 1.5, epsilon = 1e-11);
        // Deep near-horizon: rho = e^{x - 1 - rho} with rho ~ e^{-41}.
        let rho = rho_of_x(-40.0);
        let expected = (-41.0f64).exp();
        assert_relative_eq!(rho, expected * (-rho).exp(), max_relative = 1e-14);
        assert_relative_eq!(tortoise_x_rho(rho), -40.0, max_relative = 1e-14);
    }

    #[test]
    fn p_values() {
        assert_eq!(potential_factor_p(1.0).unwrap(), 0.0);
        assert_eq!(potential_factor_p(2.0).unwrap(), 0.125);
        assert_relative_eq!(potential_factor_p(1.5).unwrap(), P_MAX, epsilon = 1e-16);
        assert!(potential_factor_p(0.99).is_err());
    }

    #[test]
    fn roundtrip_log_spaced() {
        // 1e4 log-spaced radii over [1 + 1e-8, 1e6].
        let n = 10_000;
        let (a, b) = ((1e-8f64).ln(), (1e6f64 - 1.0).ln());
        for i in 0..n {
            let rho = (a + (b - a) * i as f64 / (n - 1) as f64).exp();
            let r = 1.0 + rho;
            let back = radius_r(tortoise_x(r).unwrap());
            assert!((back - r).abs() <= 1e-12 * r.max(1.0), "r={r}: {back}");
        }
    }

    #[test]
    fn horizon_decay_of_p() {
        let mut x = -20.0;
        while x > -300.0 {
            let p = potential_factor_p_rho(rho_of_x(x));
            assert!(p <= (x - 1.0).exp() * 1.01, "x={x}");
            x -= 3.7;
        }
    }

    #[test]
    fn chart_invariants() {
        let chart = RadialChart::new(1.0 + 1e-6, 1e6, 500).unwrap();
        assert!(chart.r_grid.windows(2).all(|w| w[1] > w[0]));
        assert!(chart.x_grid.windows(2).all(|w| w[1] > w[0]));
        assert!(chart.r_grid.iter().all(|r| *r > 1.0));
        assert!(chart.p_grid.iter().all(|p| (0.0..=P_MAX).contains(p)));
        for (r, x) in chart.r_grid.iter().zip(&chart.x_grid) {
            assert!((x - r - (r - 1.0).ln()).abs() < 1e-9 * x.abs().max(1.0));
        }
        assert_relative_eq!(chart.r_grid[0], 1.0 + 1e-6, max_relative = 1e-12);
        assert_relative_eq!(*chart.r_grid.last().unwrap(), 1e6, max_relative = 1e-12);
        // Only near or only far.
        assert!(RadialChart::new(1.5, 5.0, 10).unwrap().r_grid.len() == 10);
        assert!(RadialChart::new(20.0, 500.0, 10).unwrap().r_grid.len() == 10);
        assert!(RadialChart::new(1.0, 5.0, 10).is_err());
    }

    proptest! {
        #[test]
        fn p_bounded(r in 1.0f64..1e8) {
            let p = potential_factor_p(r).unwrap();
            prop_assert!((0.0..=P_MAX * (1.0 + 1e-15)).contains(&p));
        }

        #[test]
        fn tortoise_monotone(r in 1.000_001f64..1e6, dr in 1e-6f64..10.0) {
            prop_assert!(tortoise_x(r + dr).unwrap() > tortoise_x(r).unwrap());
        }

        #[test]
        fn inverse_roundtrip_x(x in -700.0f64..1e7) {
            let rho = rho_of_x(x);
            prop_assert!(rho > 0.0);
            prop_assert!((tortoise_x_rho(rho) - x).abs() <= 1e-12 * x.abs().max(1.0));
        }
    }
}
