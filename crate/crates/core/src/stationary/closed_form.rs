//! Explicit formulas: the one-zero solution W₁, the envelope Q, the
//! Hamiltonian diagnostic H and the large-r series about W = ±1.

/// c = (3 + √3)/2, the zero of W₁.
pub fn w1_zero() -> f64 {
    0.5 * (3.0 + 3f64.sqrt())
}

/// a₁ = (1 + √3)/(5 + 3√3) = 2 − √3.
pub fn a1_exact() -> f64 {
    2.0 - 3f64.sqrt()
}

/// W₁(r) = (c − r)/(r + 3(c − 1)).
pub fn w1_closed_form(r: f64) -> f64 {
    let c = w1_zero();
    (c - r) / (r + 3.0 * (c - 1.0))
}

/// W₁′(r) = −(4c − 3)/(r + 3(c − 1))².
pub fn w1_closed_form_derivative(r: f64) -> f64 {
    let c = w1_zero();
    let d = r + 3.0 * (c - 1.0);
    -(4.0 * c - 3.0) / (d * d)
}

/// Q(r) = 1 − 1/r − 1/(2r²).
pub fn envelope_q(r: f64) -> f64 {
    1.0 - 1.0 / r - 0.5 / (r * r)
}

/// Stationary operator applied to Q, L(Q, r) = (1 − 1/r)Q″ + Q′/r² + Q(1 − Q²)/r².
pub fn l_of_q(r: f64) -> f64 {
    let q = envelope_q(r);
    let dq = 1.0 / (r * r) + 1.0 / (r * r * r);
    let d2q = -2.0 / (r * r * r) - 3.0 / r.powi(4);
    (1.0 - 1.0 / r) * d2q + dq / (r * r) + q * (1.0 - q * q) / (r * r)
}

/// H = r²W′²/2 + W²/2 − W⁴/4.
pub fn hamiltonian_h(r: f64, w: f64, wp: f64) -> f64 {
    0.5 * r * r * wp * wp + 0.5 * w * w - 0.25 * w.powi(4)
}

/// Solutions approaching W = s (s = ±1) as r → ∞ have the convergent
/// expansion W = s + Σ_{k≥1} c_k r^{−k}, where c₁ is free and, for k ≥ 2,
/// (k−1)(k+2) c_k = (k−1)(k+1) c_{k−1} + 3s [u²]_k + [u³]_k
/// with [·]_k the r^{−k} coefficient of the powers of u = W − s.
#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoticSeries {
    pub limit_sign: f64,
    pub coefficients: Vec<f64>,
}

impl AsymptoticSeries {
    pub fn new(limit_sign: f64, c1: f64, order: usize) -> Self {
        let order = order.max(1);
        let s = limit_sign.signum();
        // Index 0 is the r^0 coefficient of u, which vanishes.
        let mut c = vec![0.0; order + 1];
        let mut sq = vec![0.0; order + 1];
        let mut cube = vec![0.0; order + 1];
        c[1] = c1;
        for k in 2..=order {
            sq[k] = (1..k).map(|j| c[j] * c[k - j]).sum();
            cube[k] = (1..k).map(|j| c[j] * sq[k - j]).sum();
            let kf = k as f64;
            c[k] = ((kf - 1.0) * (kf + 1.0) * c[k - 1] + 3.0 * s * sq[k] + cube[k]) / ((kf - 1.0) * (kf + 2.0));
        }
        Self { limit_sign: s, coefficients: c }
    }

    /// Series truncated where the terms at `r_min` fall below 10⁻¹⁸ (or at
    /// order 80).
    pub fn for_radius(limit_sign: f64, c1: f64, r_min: f64) -> Self {
        let full = Self::new(limit_sign, c1, 80);
        let mut order = 1;
        for (k, ck) in full.coefficients.iter().enumerate().skip(1) {
            if !ck.is_finite() {
                break;
            }
            order = k;
            if k > 2 && (ck * r_min.powi(-(k as i32))).abs() < 1e-18 {
                break;
            }
        }
        Self { limit_sign: full.limit_sign, coefficients: full.coefficients[..=order].to_vec() }
    }

    /// (W, W′, W″) at radius `r`.
    pub fn eval(&self, r: f64) -> [f64; 3] {
        let inv = 1.0 / r;
        let (mut u, mut du, mut d2u) = (0.0, 0.0, 0.0);
        let mut p = inv;
        for (k, ck) in self.coefficients.iter().enumerate().skip(1) {
            let kf = k as f64;
            u += ck * p;
            du -= kf * ck * p * inv;
            d2u += kf * (kf + 1.0) * ck * p * inv * inv;
            p *= inv;
        }
        [self.limit_sign + u, du, d2u]
    }

    /// Size of the last included term at `r`, a truncation-error proxy.
    pub fn tail_estimate(&self, r: f64) -> f64 {
        let k = self.coefficients.len() - 1;
        (self.coefficients[k] * r.powi(-(k as i32))).abs()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn w1_values() {
        assert_relative_eq!(w1_closed_form(1.0), 0.267_949_192_43, epsilon = 1e-11);
        assert_relative_eq!(w1_closed_form(1.0), (1.0 + 3f64.sqrt()) / (5.0 + 3.0 * 3f64.sqrt()), epsilon = 1e-15);
        assert_eq!(w1_closed_form(w1_zero()), 0.0);
        let c = w1_zero();
        assert_relative_eq!(w1_closed_form(1e6), -1.0 + (4.0 * c - 3.0) / (1e6 + 3.0 * c - 3.0), epsilon = 1e-15);
        assert_relative_eq!(w1_closed_form(1e6), -0.999_993_535_9, epsilon = 1e-10);
    }

    #[test]
    fn w1_solves_stationary_equation() {
        for r in [1.0, 1.3, 2.0, 5.0, 40.0, 1e3] {
            let h = 1e-3 * r;
            let w = w1_closed_form(r);
            let wp = w1_closed_form_derivative(r);
            let fd = (w1_closed_form(r + h) - w1_closed_form(r - h)) / (2.0 * h);
            assert_relative_eq!(wp, fd, max_relative = 1e-5);
            let c = w1_zero();
            let d = r + 3.0 * (c - 1.0);
            let wpp = 2.0 * (4.0 * c - 3.0) / (d * d * d);
            let residual = r * (r - 1.0) * wpp + wp + w * (1.0 - w * w);
            assert!(residual.abs() < 1e-12 * (1.0 + r * r), "r={r}: {residual}");
        }
    }

    #[test]
    fn envelope_values() {
        assert_relative_eq!(envelope_q(3.0), 11.0 / 18.0, epsilon = 1e-15);
        assert!(envelope_q(1e9) < 1.0 && envelope_q(1e9) > 1.0 - 1e-8);
        let bound = -2.0 / 81.0 + 2.0 / 243.0 + 0.75 / 729.0 + 0.75 / 2187.0 + 0.125 / 6561.0;
        assert_relative_eq!(l_of_q(3.0), bound, max_relative = 1e-12);
        assert!(l_of_q(3.0) <= -1.0 / 81.0);
        let mut r = 3.0;
        while r < 1e4 {
            assert!(l_of_q(r) <= -1.0 / r.powi(4), "r={r}");
            r *= 1.37;
        }
    }

    #[test]
    fn hamiltonian_values() {
        assert_eq!(hamiltonian_h(7.0, 1.0, 0.0), 0.25);
        assert_eq!(hamiltonian_h(7.0, 0.0, 0.0), 0.0);
    }

    #[test]
    fn series_reproduces_w1() {
        let c = w1_zero();
        let series = AsymptoticSeries::new(-1.0, 4.0 * c - 3.0, 40);
        let (a, b) = (4.0 * c - 3.0, 3.0 * c - 3.0);
        assert_relative_eq!(series.coefficients[2], -a * b, max_relative = 1e-14);
        for r in [50.0, 1e3, 1e6] {
            let [w, wp, _] = series.eval(r);
            assert_relative_eq!(w, w1_closed_form(r), max_relative = 1e-14);
            assert_relative_eq!(wp, w1_closed_form_derivative(r), max_relative = 1e-12);
        }
    }

    #[test]
    fn series_second_coefficient() {
        for (s, c1) in [(1.0, 0.3), (-1.0, -2.0), (1.0, 5.0)] {
            let series = AsymptoticSeries::new(s, c1, 3);
            assert_relative_eq!(series.coefficients[2], 0.75 * c1 * (1.0 + s * c1), max_relative = 1e-14);
        }
    }
}
