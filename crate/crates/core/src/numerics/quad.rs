//! Composite Gauss–Legendre quadrature.

const NODES: [f64; 5] = [
    -0.906_179_845_938_664,
    -0.538_469_310_105_683_1,
    0.0,
    0.538_469_310_105_683_1,
    0.906_179_845_938_664,
];
const WEIGHTS: [f64; 5] = [
    0.236_926_885_056_189_08,
    0.478_628_670_499_366_47,
    0.568_888_888_888_888_9,
    0.478_628_670_499_366_47,
    0.236_926_885_056_189_08,
];

/// 5-point Gauss–Legendre on each panel `[edges[i], edges[i+1]]`.
pub fn gauss_legendre_panels(f: impl Fn(f64) -> f64, edges: &[f64]) -> f64 {
    edges
        .windows(2)
        .map(|w| {
            let (a, b) = (w[0], w[1]);
            let half = 0.5 * (b - a);
            let mid = 0.5 * (a + b);
            half * NODES.iter().zip(WEIGHTS).map(|(x, wt)| wt * f(mid + half * x)).sum::<f64>()
        })
        .sum()
}

/// Trapezoid rule on uniformly spaced samples.
pub fn trapezoid_uniform(values: &[f64], h: f64) -> f64 {
    match values.len() {
        0 | 1 => 0.0,
        n => h * (values[1..n - 1].iter().sum::<f64>() + 0.5 * (values[0] + values[n - 1])),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_for_degree_nine() {
        let v = gauss_legendre_panels(|x| x.powi(9) + x.powi(4), &[0.0, 2.0]);
        assert!((v - (2f64.powi(10) / 10.0 + 2f64.powi(5) / 5.0)).abs() < 1e-11);
    }

    #[test]
    fn trapezoid_linear() {
        assert!((trapezoid_uniform(&[0.0, 1.0, 2.0, 3.0], 1.0) - 4.5).abs() < 1e-15);
        assert_eq!(trapezoid_uniform(&[3.0], 1.0), 0.0);
    }
}
