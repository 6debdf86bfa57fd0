//! Regular Taylor data at the horizon.

use super::StationaryError;

/// Largest admissible starting offset δ.
pub const MAX_DELTA: f64 = 1e-4;

/// Horizon data of the regular solution with W(1) = a: first and second
/// derivatives at r = 1 and the starting offset δ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HorizonSeed {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub delta: f64,
}

impl HorizonSeed {
    /// b = −a(1 − a²) and c = −b(1 − 3a²)/2 are forced by regularity of the
    /// stationary equation at r = 1.
    pub fn new(a: f64, delta: f64) -> Result<Self, StationaryError> {
        if !(0.0..=1.0).contains(&a) {
            return Err(StationaryError::Domain(format!("horizon value a = {a} outside [0, 1]")));
        }
        if !(delta > 0.0 && delta <= MAX_DELTA) {
            return Err(StationaryError::Domain(format!("start offset delta = {delta} outside (0, {MAX_DELTA}]")));
        }
        let b = -a * (1.0 - a * a);
        let c = -0.5 * b * (1.0 - 3.0 * a * a);
        Ok(Self { a, b, c, delta })
    }

    /// Taylor polynomial value and slope at r = 1 + s for 0 ≤ s ≤ δ.
    pub fn eval(&self, s: f64) -> (f64, f64) {
        (self.a + self.b * s + 0.5 * self.c * s * s, self.b + self.c * s)
    }

    /// Second derivative of the Taylor polynomial.
    pub fn second_derivative(&self) -> f64 {
        self.c
    }

    /// (W, W′) at the starting radius 1 + δ.
    pub fn start(&self) -> (f64, f64) {
        self.eval(self.delta)
    }
}

/// (W(1+δ), W′(1+δ)) from the second-order Taylor start.
pub fn taylor_seed(a: f64, delta: f64) -> Result<(f64, f64), StationaryError> {
    Ok(HorizonSeed::new(a, delta)?.start())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn trivial_seeds() {
        assert_eq!(taylor_seed(0.0, 1e-6).unwrap(), (0.0, 0.0));
        assert_eq!(taylor_seed(1.0, 1e-6).unwrap(), (1.0, 0.0));
    }

    #[test]
    fn w1_seed_matches_closed_form_derivative() {
        let a = 2.0 - 3f64.sqrt();
        let s = HorizonSeed::new(a, 1e-6).unwrap();
        assert_relative_eq!(s.b, -0.248_711_31, epsilon = 1e-8);
        assert_relative_eq!(s.c, 0.097_570_66, epsilon = 1e-8);
        let c0 = (3.0 + 3f64.sqrt()) / 2.0;
        let exact_slope = (3.0 - 4.0 * c0) / (1.0 + 3.0 * (c0 - 1.0)).powi(2);
        assert_relative_eq!(s.b, exact_slope, max_relative = 1e-14);
        let (w, _) = s.start();
        assert_relative_eq!(w - a, -2.4871e-7, max_relative = 1e-4);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(taylor_seed(-0.1, 1e-6).is_err());
        assert!(taylor_seed(1.1, 1e-6).is_err());
        assert!(taylor_seed(0.5, 0.0).is_err());
        assert!(taylor_seed(0.5, 1e-3).is_err());
    }
}
