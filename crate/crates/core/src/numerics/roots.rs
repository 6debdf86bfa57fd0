//! Bracketing root finders.

use super::NumericsError;

/// A closed interval known to contain a sign change (or a classification
/// change) of the function it was computed for.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootBracket {
    pub lo: f64,
    pub hi: f64,
}

impl RootBracket {
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }
}

/// Sign-based bisection. Returns a bracket of width at most `tol`; an exact
/// zero collapses the bracket onto it.
pub fn bisect(f: impl Fn(f64) -> f64, lo: f64, hi: f64, tol: f64) -> Result<RootBracket, NumericsError> {
    let f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo == 0.0 {
        return Ok(RootBracket { lo, hi: lo });
    }
    if f_hi == 0.0 {
        return Ok(RootBracket { lo: hi, hi });
    }
    if !(lo < hi) || f_lo.is_nan() || f_hi.is_nan() || (f_lo > 0.0) == (f_hi > 0.0) {
        return Err(NumericsError::InvalidBracket { lo, hi });
    }
    let lo_positive = f_lo > 0.0;
    let mut found = None;
    let bracket = bisect_by(
        |x| {
            let v = f(x);
            if v == 0.0 {
                found.get_or_insert(x);
            }
            // Classification: "same side as lo".
            (v > 0.0) == lo_positive && v != 0.0
        },
        lo,
        hi,
        tol,
    );
    let bracket = bracket?;
    if let Some(x) = found {
        if x >= bracket.lo && x <= bracket.hi {
            return Ok(RootBracket { lo: x, hi: x });
        }
    }
    Ok(bracket)
}

/// Bisection on a two-valued classifier: `pred(lo)` must be `true` and
/// `pred(hi)` `false` (or vice versa). The returned bracket keeps the two
/// classifications at its endpoints.
pub fn bisect_by(mut pred: impl FnMut(f64) -> bool, lo: f64, hi: f64, tol: f64) -> Result<RootBracket, NumericsError> {
    if !(lo < hi) || !(tol > 0.0) {
        return Err(NumericsError::InvalidBracket { lo, hi });
    }
    let p_lo = pred(lo);
    let p_hi = pred(hi);
    if p_lo == p_hi {
        return Err(NumericsError::InvalidBracket { lo, hi });
    }
    let (mut a, mut b) = (lo, hi);
    while b - a > tol {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            // Bracket is a pair of adjacent doubles.
            break;
        }
        if pred(m) == p_lo {
            a = m;
        } else {
            b = m;
        }
    }
    Ok(RootBracket { lo: a, hi: b })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sqrt_two() {
        let br = bisect(|x| x * x - 2.0, 1.0, 2.0, 1e-12).unwrap();
        assert!(br.width() <= 1e-12);
        assert!((br.midpoint() - 2f64.sqrt()).abs() <= 1e-12);
    }

    #[test]
    fn odd_function_hits_zero() {
        let br = bisect(|x| x, -1.0, 1.0, 1e-12).unwrap();
        assert_eq!(br.midpoint(), 0.0);
    }

    #[test]
    fn invalid_bracket() {
        assert!(matches!(bisect(|x| x * x + 1.0, -1.0, 1.0, 1e-6), Err(NumericsError::InvalidBracket { .. })));
        assert!(bisect_by(|x| x > 0.0, 1.0, 0.0, 1e-6).is_err());
    }

    #[test]
    fn classifier_bisection_keeps_endpoints() {
        let br = bisect_by(|x| x < 0.3, 0.0, 1.0, 1e-13).unwrap();
        assert!(br.lo < 0.3 && br.hi >= 0.3);
        assert!(br.width() <= 1e-13);
    }

    #[test]
    fn stops_at_adjacent_doubles() {
        let br = bisect_by(|x| x < 0.5, 0.0, 1.0, 1e-30).unwrap();
        assert!(br.width() > 0.0 && br.width() < 1e-15);
    }
}
