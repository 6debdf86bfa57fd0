//! Piecewise Hermite interpolation.

use super::NumericsError;

fn check_knots(xs: &[f64], ys: usize) -> Result<(), NumericsError> {
    if xs.len() < 2 || xs.len() != ys {
        return Err(NumericsError::InvalidInput(format!("need >= 2 knots with matching values, got {} / {}", xs.len(), ys)));
    }
    if xs.iter().any(|x| !x.is_finite()) || xs.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(NumericsError::InvalidInput("knots must be finite and strictly increasing".into()));
    }
    Ok(())
}

/// Index `i` with `xs[i] <= x <= xs[i+1]`, clamped to the end intervals.
fn interval(xs: &[f64], x: f64) -> usize {
    let n = xs.len();
    match xs.partition_point(|k| *k <= x) {
        0 => 0,
        p if p >= n => n - 2,
        p => p - 1,
    }
}

/// C¹ piecewise cubic Hermite interpolant.
///
/// [`CubicHermite::pchip`] estimates slopes with the Fritsch–Carlson
/// weighted harmonic mean and is monotone on monotone data.
/// [`CubicHermite::with_slopes`] takes exact derivatives, which is what an ODE
/// trajectory provides and is fourth-order accurate.
#[derive(Debug, Clone, PartialEq)]
pub struct CubicHermite {
    xs: Vec<f64>,
    ys: Vec<f64>,
    slopes: Vec<f64>,
}

impl CubicHermite {
    pub fn pchip(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self, NumericsError> {
        check_knots(&xs, ys.len())?;
        let n = xs.len();
        let h: Vec<f64> = xs.windows(2).map(|w| w[1] - w[0]).collect();
        let delta: Vec<f64> = (0..n - 1).map(|k| (ys[k + 1] - ys[k]) / h[k]).collect();
        let mut d = vec![0.0; n];
        if n == 2 {
            d[0] = delta[0];
            d[1] = delta[0];
        } else {
            for k in 1..n - 1 {
                let (d0, d1) = (delta[k - 1], delta[k]);
                if d0 * d1 > 0.0 {
                    let w1 = 2.0 * h[k] + h[k - 1];
                    let w2 = h[k] + 2.0 * h[k - 1];
                    d[k] = (w1 + w2) / (w1 / d0 + w2 / d1);
                }
            }
            d[0] = edge_slope(h[0], h[1], delta[0], delta[1]);
            d[n - 1] = edge_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
        }
        Ok(Self { xs, ys, slopes: d })
    }

    pub fn with_slopes(xs: Vec<f64>, ys: Vec<f64>, slopes: Vec<f64>) -> Result<Self, NumericsError> {
        check_knots(&xs, ys.len())?;
        if slopes.len() != xs.len() {
            return Err(NumericsError::InvalidInput("slope count mismatch".into()));
        }
        Ok(Self { xs, ys, slopes })
    }

    pub fn knots(&self) -> &[f64] {
        &self.xs
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.xs[0], self.xs[self.xs.len() - 1])
    }

    /// Value and first derivative at `x` (end cubics extrapolate outside the knots).
    pub fn eval_with_derivative(&self, x: f64) -> (f64, f64) {
        let i = interval(&self.xs, x);
        let h = self.xs[i + 1] - self.xs[i];
        let t = (x - self.xs[i]) / h;
        let (y0, y1) = (self.ys[i], self.ys[i + 1]);
        let (m0, m1) = (self.slopes[i] * h, self.slopes[i + 1] * h);
        let t2 = t * t;
        let t3 = t2 * t;
        let value = (2.0 * t3 - 3.0 * t2 + 1.0) * y0 + (t3 - 2.0 * t2 + t) * m0 + (-2.0 * t3 + 3.0 * t2) * y1 + (t3 - t2) * m1;
        let deriv = ((6.0 * t2 - 6.0 * t) * y0 + (3.0 * t2 - 4.0 * t + 1.0) * m0 + (-6.0 * t2 + 6.0 * t) * y1 + (3.0 * t2 - 2.0 * t) * m1) / h;
        (value, deriv)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.eval_with_derivative(x).0
    }
}

// Three-point end slope with the shape-preserving adjustments.
fn edge_slope(h0: f64, h1: f64, m0: f64, m1: f64) -> f64 {
    let d = ((2.0 * h0 + h1) * m0 - h0 * m1) / (h0 + h1);
    if d.signum() != m0.signum() || m0 == 0.0 {
        0.0
    } else if m0.signum() != m1.signum() && d.abs() > 3.0 * m0.abs() {
        3.0 * m0
    } else {
        d
    }
}

/// Convenience constructor matching the usual PCHIP entry point.
pub fn pchip_interpolant(xs: Vec<f64>, ys: Vec<f64>) -> Result<CubicHermite, NumericsError> {
    CubicHermite::pchip(xs, ys)
}

/// C² piecewise quintic Hermite interpolant from values, first and second
/// derivatives at the knots.
#[derive(Debug, Clone, PartialEq)]
pub struct QuinticHermite {
    xs: Vec<f64>,
    f: Vec<f64>,
    df: Vec<f64>,
    d2f: Vec<f64>,
}

impl QuinticHermite {
    pub fn new(xs: Vec<f64>, f: Vec<f64>, df: Vec<f64>, d2f: Vec<f64>) -> Result<Self, NumericsError> {
        check_knots(&xs, f.len())?;
        if df.len() != xs.len() || d2f.len() != xs.len() {
            return Err(NumericsError::InvalidInput("derivative count mismatch".into()));
        }
        Ok(Self { xs, f, df, d2f })
    }

    pub fn knots(&self) -> &[f64] {
        &self.xs
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.xs[0], self.xs[self.xs.len() - 1])
    }

    /// Value, first and second derivative.
    pub fn eval_all(&self, x: f64) -> [f64; 3] {
        let i = interval(&self.xs, x);
        let h = self.xs[i + 1] - self.xs[i];
        let t = (x - self.xs[i]) / h;
        let c0 = self.f[i];
        let c1 = h * self.df[i];
        let c2 = 0.5 * h * h * self.d2f[i];
        let a = self.f[i + 1] - (c0 + c1 + c2);
        let b = h * self.df[i + 1] - (c1 + 2.0 * c2);
        let c = h * h * self.d2f[i + 1] - 2.0 * c2;
        let c3 = 10.0 * a - 4.0 * b + 0.5 * c;
        let c4 = -15.0 * a + 7.0 * b - c;
        let c5 = 6.0 * a - 3.0 * b + 0.5 * c;
        let v = c0 + t * (c1 + t * (c2 + t * (c3 + t * (c4 + t * c5))));
        let d1 = c1 + t * (2.0 * c2 + t * (3.0 * c3 + t * (4.0 * c4 + t * 5.0 * c5)));
        let d2 = 2.0 * c2 + t * (6.0 * c3 + t * (12.0 * c4 + t * 20.0 * c5));
        [v, d1 / h, d2 / (h * h)]
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.eval_all(x)[0]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn two_points_is_linear() {
        let p = pchip_interpolant(vec![0.0, 1.0], vec![0.0, 1.0]).unwrap();
        for x in [0.0, 0.25, 0.5, 0.9, 1.0] {
            let (v, d) = p.eval_with_derivative(x);
            assert!((v - x).abs() < 1e-15);
            assert!((d - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn constant_data() {
        let p = pchip_interpolant(vec![0.0, 0.3, 1.0, 2.5], vec![4.0; 4]).unwrap();
        for x in [0.1, 0.7, 2.0] {
            let (v, d) = p.eval_with_derivative(x);
            assert_eq!(v, 4.0);
            assert_eq!(d, 0.0);
        }
    }

    #[test]
    fn rejects_unsorted_knots() {
        assert!(pchip_interpolant(vec![0.0, 0.0, 1.0], vec![1.0, 2.0, 3.0]).is_err());
        assert!(pchip_interpolant(vec![1.0], vec![1.0]).is_err());
        assert!(QuinticHermite::new(vec![0.0, 1.0], vec![0.0, 1.0], vec![0.0], vec![0.0, 0.0]).is_err());
    }

    #[test]
    fn quintic_reproduces_quintic_polynomial() {
        let p = |x: f64| 1.0 - 2.0 * x + 0.5 * x.powi(3) - 0.1 * x.powi(5);
        let dp = |x: f64| -2.0 + 1.5 * x * x - 0.5 * x.powi(4);
        let d2p = |x: f64| 3.0 * x - 2.0 * x.powi(3);
        let xs = vec![-1.0, 0.2, 1.3, 2.0];
        let q = QuinticHermite::new(
            xs.clone(),
            xs.iter().map(|x| p(*x)).collect(),
            xs.iter().map(|x| dp(*x)).collect(),
            xs.iter().map(|x| d2p(*x)).collect(),
        )
        .unwrap();
        for x in [-0.7, 0.0, 0.9, 1.7] {
            let [v, d, dd] = q.eval_all(x);
            assert!((v - p(x)).abs() < 1e-12);
            assert!((d - dp(x)).abs() < 1e-12);
            assert!((dd - d2p(x)).abs() < 1e-11);
        }
    }

    proptest! {
        #[test]
        fn pchip_exact_at_knots_and_monotone(steps in prop::collection::vec((0.01f64..2.0, 0.0f64..3.0), 2..30)) {
            let mut xs = vec![0.0];
            let mut ys = vec![0.0];
            for (dx, dy) in &steps {
                xs.push(xs.last().unwrap() + dx);
                ys.push(ys.last().unwrap() + dy);
            }
            let p = pchip_interpolant(xs.clone(), ys.clone()).unwrap();
            for (x, y) in xs.iter().zip(&ys) {
                prop_assert!((p.eval(*x) - y).abs() <= 1e-12 * (1.0 + y.abs()));
            }
            let mut prev = f64::NEG_INFINITY;
            let (a, b) = p.domain();
            for k in 0..=400 {
                let x = a + (b - a) * k as f64 / 400.0;
                let v = p.eval(x);
                prop_assert!(v >= prev - 1e-12);
                prev = v;
            }
        }

        #[test]
        fn pchip_keeps_sign_of_positive_data(vals in prop::collection::vec(0.001f64..5.0, 3..20)) {
            let xs: Vec<f64> = (0..vals.len()).map(|i| i as f64).collect();
            let p = pchip_interpolant(xs, vals.clone()).unwrap();
            for k in 0..(vals.len() - 1) * 10 {
                prop_assert!(p.eval(k as f64 / 10.0) > 0.0);
            }
        }
    }
}
