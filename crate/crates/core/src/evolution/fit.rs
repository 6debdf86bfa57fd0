//! Exponential growth-rate fit on a deviation-norm series.

use serde::{Deserialize, Serialize};

use super::energy::EnergyReport;
use super::SATURATION;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitConfig {
    /// The window opens once the deviation reaches this multiple of its
    /// initial value.
    pub start_factor: f64,
    /// The window closes once max|u| exceeds this value.
    pub saturation: f64,
    pub min_samples: usize,
    /// Fits with a lower coefficient of determination are not accepted.
    pub min_r_squared: f64,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self { start_factor: 10.0, saturation: SATURATION, min_samples: 20, min_r_squared: 0.999 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitStatus {
    Accepted,
    /// A window exists but the log-linear fit is below `min_r_squared`.
    PoorFit,
    /// The deviation never entered the growth window with enough samples.
    NoGrowth,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthFit {
    pub status: FitStatus,
    pub lambda_measured: Option<f64>,
    pub fit_window: Option<(f64, f64)>,
    pub r_squared: Option<f64>,
    pub lambda_predicted: Option<f64>,
    pub samples: usize,
}

impl GrowthFit {
    /// |λ_measured − λ_predicted| / λ_predicted when both exist.
    pub fn relative_discrepancy(&self) -> Option<f64> {
        match (self.lambda_measured, self.lambda_predicted) {
            (Some(m), Some(p)) if p != 0.0 => Some(((m - p) / p).abs()),
            _ => None,
        }
    }
}

/// Least-squares fit of ln(deviation_norm) against t on the samples where the
/// deviation has grown by `start_factor` and max|u| is still below
/// `saturation` (the first contiguous such stretch).
pub fn fit_growth(series: &[EnergyReport], lambda_predicted: Option<f64>, cfg: &FitConfig) -> GrowthFit {
    let no_growth = |samples| GrowthFit {
        status: FitStatus::NoGrowth,
        lambda_measured: None,
        fit_window: None,
        r_squared: None,
        lambda_predicted,
        samples,
    };
    let Some(first) = series.first() else {
        return no_growth(0);
    };
    let threshold = cfg.start_factor * first.deviation_norm;
    if !(threshold > 0.0) {
        return no_growth(0);
    }
    let Some(start) = series.iter().position(|e| e.deviation_norm >= threshold) else {
        return no_growth(0);
    };
    let window: Vec<&EnergyReport> = series[start..]
        .iter()
        .take_while(|e| e.max_abs_u <= cfg.saturation && e.deviation_norm > 0.0 && e.deviation_norm.is_finite())
        .collect();
    if window.len() < cfg.min_samples {
        return no_growth(window.len());
    }
    let n = window.len() as f64;
    let mean_t = window.iter().map(|e| e.t).sum::<f64>() / n;
    let mean_y = window.iter().map(|e| e.deviation_norm.ln()).sum::<f64>() / n;
    let (mut stt, mut sty, mut syy) = (0.0, 0.0, 0.0);
    for e in &window {
        let dt = e.t - mean_t;
        let dy = e.deviation_norm.ln() - mean_y;
        stt += dt * dt;
        sty += dt * dy;
        syy += dy * dy;
    }
    if !(stt > 0.0) {
        return no_growth(window.len());
    }
    let slope = sty / stt;
    let r_squared = if syy > 0.0 { sty * sty / (stt * syy) } else { 1.0 };
    let status = if slope > 0.0 && r_squared >= cfg.min_r_squared { FitStatus::Accepted } else { FitStatus::PoorFit };
    GrowthFit {
        status,
        lambda_measured: Some(slope),
        fit_window: Some((window[0].t, window[window.len() - 1].t)),
        r_squared: Some(r_squared),
        lambda_predicted,
        samples: window.len(),
    }
}

/// Linear against nonlinear evolution of the same initial data, sampled at
/// the same times.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunComparison {
    /// Largest |‖·‖_lin − ‖·‖_nl| / ‖·‖_lin over samples where the linear
    /// deviation norm is below the smallness bound.
    pub max_relative_difference: f64,
    /// First sample time where the relative difference exceeds the
    /// departure tolerance.
    pub departure_time: Option<f64>,
    /// Nonlinear deviation norm at the last sample before departure (or at
    /// the end of the run) over its initial value.
    pub growth_before_departure: f64,
}

pub fn compare_runs(linear: &[EnergyReport], nonlinear: &[EnergyReport], small: f64, departure_tol: f64) -> RunComparison {
    let mut max_rel = 0.0f64;
    let mut departure_time = None;
    let mut growth = 1.0;
    let initial = nonlinear.first().map_or(0.0, |e| e.deviation_norm);
    for (a, b) in linear.iter().zip(nonlinear) {
        let rel = if a.deviation_norm > 0.0 { (a.deviation_norm - b.deviation_norm).abs() / a.deviation_norm } else { 0.0 };
        if a.deviation_norm < small {
            max_rel = max_rel.max(rel);
        }
        if departure_time.is_none() {
            if rel > departure_tol {
                departure_time = Some(b.t);
            } else if initial > 0.0 {
                growth = b.deviation_norm / initial;
            }
        }
    }
    RunComparison { max_relative_difference: max_rel, departure_time, growth_before_departure: growth }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series(f: impl Fn(f64) -> f64) -> Vec<EnergyReport> {
        (0..400)
            .map(|k| {
                let t = 0.25 * k as f64;
                let d = f(t);
                EnergyReport { t, total: 1.0, kinetic: 0.0, gradient: 0.0, potential: 1.0, deviation_norm: d, max_abs_u: d }
            })
            .collect()
    }

    #[test]
    fn exact_exponential() {
        let s = series(|t| 1e-6 * (0.3 * t).exp());
        let fit = fit_growth(&s, Some(0.3), &FitConfig::default());
        assert_eq!(fit.status, FitStatus::Accepted);
        assert!((fit.lambda_measured.unwrap() - 0.3).abs() < 1e-6);
        assert!(fit.relative_discrepancy().unwrap() < 1e-6);
        let (a, b) = fit.fit_window.unwrap();
        assert!(a >= 10f64.ln() / 0.3 - 0.25 && b <= (0.05f64 / 1e-6).ln() / 0.3 + 1e-9);
    }

    #[test]
    fn flat_series_has_no_growth() {
        let s = series(|_| 1e-3);
        let fit = fit_growth(&s, None, &FitConfig::default());
        assert_eq!(fit.status, FitStatus::NoGrowth);
        assert!(fit.lambda_measured.is_none());
    }

    #[test]
    fn comparison_finds_departure() {
        let lin = series(|t| 1e-6 * (0.3 * t).exp());
        let nl = series(|t| {
            let d = 1e-6 * (0.3 * t).exp();
            d / (1.0 + 10.0 * d)
        });
        let c = compare_runs(&lin, &nl, 1e-4, 1e-2);
        assert!(c.max_relative_difference < 1e-3);
        let t = c.departure_time.unwrap();
        assert!((1e-6 * (0.3 * t).exp() - 1e-3).abs() < 1e-4);
        assert!(c.growth_before_departure > 900.0 && c.growth_before_departure < 1000.0);
    }

    #[test]
    fn too_few_samples_is_no_growth() {
        let s = series(|t| 1e-3 * (3.0 * t).exp());
        assert_eq!(fit_growth(&s, None, &FitConfig::default()).status, FitStatus::NoGrowth);
    }
}
