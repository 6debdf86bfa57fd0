//! File formats: JSON documents with a `format_version` and CSV tables, all
//! numbers written with 17 significant digits so that output is
//! byte-identical across runs and round-trips every f64 exactly.

use std::io::{self, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::ser::{Formatter, PrettyFormatter};
use thiserror::Error;

use crate::evolution::{EnergyReport, GrowthFit, RunComparison, Termination};
use crate::spectrum::{Background, InequalityCheck, Method, SpectrumReport};
use crate::stationary::{AsymptoticSeries, Check, ShotRecord, StationaryError, StationaryProfile, Tail};

/// Version written into every file. Readers accept any minor version of
/// the same major version.
pub const FORMAT_VERSION: &str = "1.0";
pub const MASS_UNITS: &str = "2m";

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
    #[error("{path}: malformed JSON: {source}")]
    Json { path: String, source: serde_json::Error },
    #[error("{path}: unsupported format_version {found:?} (this build reads {FORMAT_VERSION})")]
    Version { path: String, found: String },
    #[error("{path}: expected a {expected} file, found {found:?}")]
    Kind { path: String, expected: &'static str, found: String },
    #[error("{path}: inconsistent contents: {detail}")]
    Invalid { path: String, detail: String },
}

/// serde_json formatter that delegates layout to the pretty printer and
/// writes floats as `{:.16e}` (non-finite values as `null`).
struct FixedDigits<'a>(PrettyFormatter<'a>);

impl Formatter for FixedDigits<'_> {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        if value.is_finite() {
            write!(writer, "{value:.16e}")
        } else {
            writer.write_all(b"null")
        }
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }

    fn begin_array<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.begin_array(writer)
    }

    fn end_array<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_array(writer)
    }

    fn begin_array_value<W: ?Sized + Write>(&mut self, writer: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(writer, first)
    }

    fn end_array_value<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_array_value(writer)
    }

    fn begin_object<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.begin_object(writer)
    }

    fn end_object<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_object(writer)
    }

    fn begin_object_key<W: ?Sized + Write>(&mut self, writer: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(writer, first)
    }

    fn end_object_key<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_object_key(writer)
    }

    fn begin_object_value<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.begin_object_value(writer)
    }

    fn end_object_value<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_object_value(writer)
    }
}

/// JSON text of `value` with fixed 17-digit floats and a trailing newline.
pub fn to_json_string<T: Serialize>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, FixedDigits(PrettyFormatter::with_indent(b"  ")));
    value.serialize(&mut ser).expect("serialising into memory cannot fail");
    buf.push(b'\n');
    String::from_utf8(buf).expect("serde_json emits UTF-8")
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), IoError> {
    write_text(path, &to_json_string(value))
}

pub fn write_text(path: &Path, text: &str) -> Result<(), IoError> {
    std::fs::write(path, text).map_err(|source| IoError::Io { path: path.display().to_string(), source })
}

/// Reads a JSON document, checks `format_version` and `kind`, then
/// deserialises it.
pub fn read_json<T: DeserializeOwned>(path: &Path, kind: &'static str) -> Result<T, IoError> {
    let name = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|source| IoError::Io { path: name.clone(), source })?;
    let value: serde_json::Value =
        serde_json::from_str(&text).map_err(|source| IoError::Json { path: name.clone(), source })?;
    let version = value.get("format_version").and_then(|v| v.as_str()).unwrap_or("").to_string();
    if !version_compatible(&version) {
        return Err(IoError::Version { path: name, found: version });
    }
    let found = value.get("kind").and_then(|v| v.as_str()).unwrap_or("").to_string();
    if found != kind {
        return Err(IoError::Kind { path: name, expected: kind, found });
    }
    serde_json::from_value(value).map_err(|source| IoError::Json { path: name, source })
}

/// True when `version` has the same major number as [`FORMAT_VERSION`].
pub fn version_compatible(version: &str) -> bool {
    let major = |v: &str| v.split('.').next().and_then(|m| m.parse::<u32>().ok());
    matches!((major(version), major(FORMAT_VERSION)), (Some(a), Some(b)) if a == b)
}

fn float_row(values: &[f64]) -> String {
    values.iter().map(|v| format!("{v:.16e}")).collect::<Vec<_>>().join(",")
}

/// CSV with a header line and one row of floats per record.
pub fn csv_table(header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        out.push_str(&float_row(&row));
        out.push('\n');
    }
    out
}

/// Parses a CSV written by [`csv_table`] into its header and rows.
pub fn parse_csv(text: &str) -> Result<(Vec<String>, Vec<Vec<f64>>), String> {
    let mut lines = text.lines();
    let header = lines.next().ok_or("empty CSV")?.split(',').map(str::to_string).collect::<Vec<_>>();
    let rows = lines
        .filter(|l| !l.is_empty())
        .map(|l| l.split(',').map(|v| v.parse::<f64>().map_err(|e| format!("{v}: {e}"))).collect::<Result<Vec<_>, _>>())
        .collect::<Result<Vec<_>, _>>()?;
    Ok((header, rows))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntegratorRecord {
    pub rel_tol: f64,
    pub abs_tol: f64,
}

/// Behaviour beyond the last sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TailRecord {
    /// W = limit_sign + Σ_{k≥1} coefficients[k−1] r^{−k}.
    Series { limit_sign: f64, coefficients: Vec<f64> },
    Constant { value: f64 },
}

/// Stationary solution file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionFile {
    pub format_version: String,
    pub kind: String,
    pub mass_units: String,
    pub n: usize,
    pub a: f64,
    pub delta: f64,
    pub limit_sign: f64,
    /// Present for the synthetic constant solutions W ≡ value.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constant: Option<f64>,
    pub r: Vec<f64>,
    /// r − 1 at full relative precision near the horizon.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub rho: Vec<f64>,
    #[serde(rename = "W")]
    pub w: Vec<f64>,
    #[serde(rename = "Wp")]
    pub wp: Vec<f64>,
    pub residual_norm: f64,
    pub r_trust: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_match: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bracket: Option<[f64; 2]>,
    pub integrator: IntegratorRecord,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tail: Option<TailRecord>,
    pub classification_log: Vec<ShotRecord>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub checks: Vec<Check>,
}

pub const SOLUTION_KIND: &str = "stationary_solution";
pub const SPECTRUM_KIND: &str = "spectrum";
pub const GROWTH_KIND: &str = "growth_fit";
pub const VERIFY_KIND: &str = "verify_report";

impl SolutionFile {
    pub fn from_profile(p: &StationaryProfile, checks: Vec<Check>) -> Self {
        let tail = match &p.tail {
            Tail::Series(s) => {
                TailRecord::Series { limit_sign: s.limit_sign, coefficients: s.coefficients.iter().skip(1).copied().collect() }
            }
            Tail::Constant(v) => TailRecord::Constant { value: *v },
        };
        Self {
            format_version: FORMAT_VERSION.into(),
            kind: SOLUTION_KIND.into(),
            mass_units: MASS_UNITS.into(),
            n: p.n,
            a: p.a_n,
            delta: p.delta,
            limit_sign: p.limit_sign,
            constant: None,
            r: p.radii(),
            rho: p.rho.clone(),
            w: p.w.clone(),
            wp: p.wp.clone(),
            residual_norm: p.residual_norm,
            r_trust: p.r_trust,
            r_match: p.r_match,
            bracket: p.bracket.map(|(a, b)| [a, b]),
            integrator: IntegratorRecord { rel_tol: p.rel_tol, abs_tol: p.abs_tol },
            tail: Some(tail),
            classification_log: p.classification_log.clone(),
            checks,
        }
    }

    /// The synthetic solution W ≡ `value` (a stationary solution for
    /// value ∈ {−1, 0, 1}).
    pub fn constant(value: f64) -> Result<Self, StationaryError> {
        let mut f = Self::from_profile(&StationaryProfile::constant(value)?, Vec::new());
        f.constant = Some(value);
        Ok(f)
    }

    /// Rebuilds the profile evaluator, checking array consistency.
    pub fn to_profile(&self) -> Result<StationaryProfile, String> {
        let len = self.r.len();
        if len == 0 || self.w.len() != len || self.wp.len() != len || (!self.rho.is_empty() && self.rho.len() != len) {
            return Err(format!("array lengths r {}, rho {}, W {}, Wp {}", len, self.rho.len(), self.w.len(), self.wp.len()));
        }
        if self.r.windows(2).any(|w| !(w[1] > w[0])) {
            return Err("r[] is not strictly increasing".into());
        }
        let rho = if self.rho.is_empty() { self.r.iter().map(|r| r - 1.0).collect() } else { self.rho.clone() };
        let tail = match &self.tail {
            Some(TailRecord::Series { limit_sign, coefficients }) => {
                let mut c = vec![0.0];
                c.extend(coefficients);
                Tail::Series(AsymptoticSeries { limit_sign: *limit_sign, coefficients: c })
            }
            Some(TailRecord::Constant { value }) => Tail::Constant(*value),
            None => Tail::Constant(self.limit_sign),
        };
        let mut p = StationaryProfile::from_samples(self.n, self.a, self.delta, rho, self.w.clone(), self.wp.clone(), tail)
            .map_err(|e| e.to_string())?;
        if let Some(v) = self.constant {
            p.limit_sign = v.signum();
        }
        p.r_trust = self.r_trust;
        p.r_match = self.r_match;
        p.bracket = self.bracket.map(|[a, b]| (a, b));
        p.rel_tol = self.integrator.rel_tol;
        p.abs_tol = self.integrator.abs_tol;
        p.classification_log = self.classification_log.clone();
        Ok(p)
    }

    /// Background for the spectrum and evolution modules.
    pub fn background(&self) -> Result<Background, String> {
        match self.constant {
            Some(v) => Ok(Background::Constant(v)),
            None => Ok(Background::Profile(std::sync::Arc::new(self.to_profile()?))),
        }
    }

    pub fn describe(&self) -> String {
        match self.constant {
            Some(v) => format!("W = {v}"),
            None => format!("W_{} (a = {:.16e})", self.n, self.a),
        }
    }
}

/// Negative-eigenvalue counts and node counts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumCounts {
    pub negative: usize,
    /// n for Wₙ, where n negative eigenvalues are expected.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected: Option<usize>,
    pub nodes: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodDeltas {
    /// |μᵢ(fd) − μᵢ(shooting)| / |μᵢ| per pair.
    pub per_pair: Vec<f64>,
    pub max: Option<f64>,
}

/// Spectrum file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumFile {
    pub format_version: String,
    pub kind: String,
    pub mass_units: String,
    pub solution_ref: String,
    pub method: Method,
    pub window: [f64; 2],
    pub h: f64,
    pub n_points: usize,
    pub eigenvalues: Vec<f64>,
    pub growth_rates: Vec<f64>,
    pub error_estimates: Vec<f64>,
    pub counts: SpectrumCounts,
    #[serde(rename = "integral_V")]
    pub integral_v: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub method_deltas: Option<MethodDeltas>,
    pub inequalities: Vec<InequalityCheck>,
    pub quadratic_form_residuals: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub window_robustness: Vec<f64>,
    /// W is continued by its limit beyond this radius.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub limit_extension_radius: Option<f64>,
}

impl SpectrumFile {
    pub fn from_report(report: &SpectrumReport, solution_ref: String, n_points: usize) -> Self {
        Self {
            format_version: FORMAT_VERSION.into(),
            kind: SPECTRUM_KIND.into(),
            mass_units: MASS_UNITS.into(),
            solution_ref,
            method: report.method,
            window: [report.window.0, report.window.1],
            h: report.h,
            n_points,
            eigenvalues: report.eigenvalues.clone(),
            growth_rates: report.growth_rates.clone(),
            error_estimates: report.error_estimates.clone(),
            counts: SpectrumCounts { negative: report.negative_count, expected: None, nodes: Vec::new() },
            integral_v: None,
            method_deltas: None,
            inequalities: Vec::new(),
            quadratic_form_residuals: Vec::new(),
            window_robustness: Vec::new(),
            limit_extension_radius: None,
        }
    }

    /// λ₀ when the spectrum has a negative eigenvalue.
    pub fn lambda0(&self) -> Option<f64> {
        self.growth_rates.first().copied()
    }
}

/// Companion CSV with columns x, phi_0, phi_1, ….
pub fn eigenfunctions_csv(report: &SpectrumReport) -> String {
    let mut header = vec!["x".to_string()];
    header.extend((0..report.eigenfunctions.len()).map(|i| format!("phi_{i}")));
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
    let rows = report.x_grid.iter().enumerate().map(|(j, x)| {
        let mut row = vec![*x];
        row.extend(report.eigenfunctions.iter().map(|phi| phi[j]));
        row
    });
    csv_table(&header_refs, rows)
}

pub const SERIES_HEADER: [&str; 7] =
    ["t", "energy_total", "energy_kinetic", "energy_gradient", "energy_potential", "deviation_norm", "max_abs_u"];

pub fn series_csv(series: &[EnergyReport]) -> String {
    csv_table(
        &SERIES_HEADER,
        series.iter().map(|e| vec![e.t, e.total, e.kinetic, e.gradient, e.potential, e.deviation_norm, e.max_abs_u]),
    )
}

/// Inverse of [`series_csv`].
pub fn parse_series_csv(text: &str) -> Result<Vec<EnergyReport>, String> {
    let (header, rows) = parse_csv(text)?;
    if header != SERIES_HEADER {
        return Err(format!("unexpected header {header:?}"));
    }
    rows.into_iter()
        .map(|r| {
            if r.len() != 7 {
                return Err(format!("row with {} columns", r.len()));
            }
            Ok(EnergyReport {
                t: r[0],
                total: r[1],
                kinetic: r[2],
                gradient: r[3],
                potential: r[4],
                deviation_norm: r[5],
                max_abs_u: r[6],
            })
        })
        .collect()
}

pub fn snapshot_csv(x: &[f64], u: &[f64], pi: &[f64]) -> String {
    csv_table(&["x", "u", "pi"], x.iter().zip(u).zip(pi).map(|((x, u), p)| vec![*x, *u, *p]))
}

/// Growth-fit summary file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthFile {
    pub format_version: String,
    pub kind: String,
    pub mass_units: String,
    pub solution_ref: String,
    pub lambda_measured: Option<f64>,
    pub lambda_predicted: Option<f64>,
    pub relative_discrepancy: Option<f64>,
    pub fit_window: Option<[f64; 2]>,
    pub r_squared: Option<f64>,
    pub fit: GrowthFit,
    pub termination: Termination,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub linear_comparison: Option<RunComparison>,
}

impl GrowthFile {
    pub fn new(solution_ref: String, fit: GrowthFit, termination: Termination, comparison: Option<RunComparison>) -> Self {
        Self {
            format_version: FORMAT_VERSION.into(),
            kind: GROWTH_KIND.into(),
            mass_units: MASS_UNITS.into(),
            solution_ref,
            lambda_measured: fit.lambda_measured,
            lambda_predicted: fit.lambda_predicted,
            relative_discrepancy: fit.relative_discrepancy(),
            fit_window: fit.fit_window.map(|(a, b)| [a, b]),
            r_squared: fit.r_squared,
            fit,
            termination,
            linear_comparison: comparison,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn floats_have_seventeen_digits() {
        let s = to_json_string(&serde_json::json!({"x": 0.1, "y": [1.0, -2.5e-300], "z": f64::NAN}));
        assert!(s.contains("1.0000000000000001e-1"));
        assert!(s.contains("-2.5000000000000000e-300"));
        assert!(s.contains("null"));
        assert_eq!(s, to_json_string(&serde_json::json!({"x": 0.1, "y": [1.0, -2.5e-300], "z": f64::NAN})));
    }

    #[test]
    fn version_rules() {
        assert!(version_compatible("1.0"));
        assert!(version_compatible("1.7"));
        assert!(!version_compatible("2.0"));
        assert!(!version_compatible(""));
    }

    #[test]
    fn constant_solution_roundtrip() {
        let f = SolutionFile::constant(1.0).unwrap();
        let text = to_json_string(&f);
        let back: SolutionFile = serde_json::from_str(&text).unwrap();
        assert_eq!(back, f);
        assert!(matches!(back.background().unwrap(), Background::Constant(v) if v == 1.0));
    }

    #[test]
    fn rejects_foreign_major_version() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("future.json");
        let mut f = SolutionFile::constant(1.0).unwrap();
        f.format_version = "2.0".into();
        write_json(&path, &f).unwrap();
        let err = read_json::<SolutionFile>(&path, SOLUTION_KIND).unwrap_err();
        assert!(matches!(err, IoError::Version { .. }), "{err}");
        f.format_version = FORMAT_VERSION.into();
        write_json(&path, &f).unwrap();
        assert!(matches!(read_json::<SolutionFile>(&path, SPECTRUM_KIND), Err(IoError::Kind { .. })));
        assert!(read_json::<SolutionFile>(&path, SOLUTION_KIND).is_ok());
    }

    proptest! {
        #[test]
        fn series_csv_roundtrip(values in prop::collection::vec(prop::num::f64::NORMAL, 7..70)) {
            let series: Vec<EnergyReport> = values.chunks_exact(7).map(|r| EnergyReport {
                t: r[0], total: r[1], kinetic: r[2], gradient: r[3], potential: r[4], deviation_norm: r[5], max_abs_u: r[6],
            }).collect();
            let back = parse_series_csv(&series_csv(&series)).unwrap();
            prop_assert_eq!(back, series);
        }
    }
}
