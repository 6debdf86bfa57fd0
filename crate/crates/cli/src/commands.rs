//! The four subcommands.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use log::warn;
use ymlab_core::evolution::{
    boundary_efolds, compare_runs, eigenmode, evolve, fit_growth, gaussian_pulse, EnergyReport, EvolutionGrid, EvolutionRun,
    EvolveConfig, FieldState, FitConfig, FitStatus, Mode, PulseDirection, DEFAULT_CFL, DEFAULT_POINTS, DEFAULT_WINDOW,
    MIN_BOUNDARY_EFOLDS, SATURATION,
};
use ymlab_core::io::{
    eigenfunctions_csv, read_json, series_csv, snapshot_csv, to_json_string, write_json, write_text, GrowthFile, IoError,
    MethodDeltas, SolutionFile, SpectrumFile, SOLUTION_KIND, SPECTRUM_KIND,
};
use ymlab_core::spectrum::{
    build_potential, check_eigenfunction_inequalities, default_grid, eigen_fd, eigen_shooting, node_count,
    quadratic_form_residuals, relative_disagreement, window_robustness, Background, Method, SpectrumReport, DEFAULT_SPACING,
};
use ymlab_core::stationary::{find_a_n, validate_profile, validate_with_shots, Check, PropertyReport, StationaryError};
use ymlab_core::verify::{self, Entry, SuiteOptions};

use crate::config::RunConfig;
use crate::{
    BackgroundArg, Cli, CliError, Command, EvolveArgs, MethodArg, ModeArg, Perturbation, SpectrumArgs, StationaryArgs,
    VerifyArgs, EXIT_OK, EXIT_SEARCH, EXIT_VERIFY,
};

/// Pairs requested beyond n when none is configured.
const DEFAULT_EXTRA_PAIRS: usize = 2;
/// Default ε of the eigenmode perturbation.
const DEFAULT_MODE_AMPLITUDE: f64 = 1e-5;
/// Default pulse when none is given on the vacuum.
const DEFAULT_PULSE: Perturbation = Perturbation::Gauss { center: 0.0, width: 5.0, amplitude: 1e-3 };

struct Context<'a> {
    out_dir: &'a Path,
    quiet: bool,
    config: RunConfig,
}

impl Context<'_> {
    fn say(&self, line: impl AsRef<str>) {
        if !self.quiet {
            println!("{}", line.as_ref());
        }
    }

    fn path(&self, name: &str) -> PathBuf {
        self.out_dir.join(name)
    }
}

fn io_usage(e: IoError) -> CliError {
    CliError::usage(e.to_string())
}

fn io_write(e: IoError) -> CliError {
    CliError::invariant(format!("writing output failed: {e}"))
}

pub fn dispatch(cli: &Cli) -> Result<u8, CliError> {
    let config = RunConfig::load(cli.config.as_deref())?;
    std::fs::create_dir_all(&cli.out_dir).map_err(|e| CliError::usage(format!("{}: {e}", cli.out_dir.display())))?;
    let ctx = Context { out_dir: &cli.out_dir, quiet: cli.quiet, config };
    match &cli.command {
        Command::Stationary(a) => stationary(&ctx, a),
        Command::Spectrum(a) => spectrum(&ctx, a),
        Command::Evolve(a) => evolution(&ctx, a),
        Command::Verify(a) => verification(&ctx, a),
    }
}

fn stationary(ctx: &Context, args: &StationaryArgs) -> Result<u8, CliError> {
    if let Some(v) = args.constant {
        if ![-1.0, 0.0, 1.0].contains(&v) {
            return Err(CliError::usage(format!("--constant must be -1, 0 or 1, got {v}")));
        }
        let file = SolutionFile::constant(v).map_err(|e| CliError::usage(e.to_string()))?;
        let name = args.output.clone().unwrap_or_else(|| format!("constant_{}.json", v as i32));
        write_json(&ctx.path(&name), &file).map_err(io_write)?;
        ctx.say(format!("constant solution W = {v} written to {}", ctx.path(&name).display()));
        return Ok(EXIT_OK);
    }
    let n = args.n.unwrap_or(0);
    if n == 0 {
        return Err(CliError::usage("--n must be at least 1"));
    }
    let mut cfg = ctx.config.stationary.clone();
    let rel = args.rel_tol.unwrap_or(cfg.rel_tol);
    let abs = args.abs_tol.unwrap_or(cfg.abs_tol);
    cfg = cfg.with_tolerances(rel, abs);
    if let Some(d) = args.delta {
        cfg.delta = d;
    }
    cfg.validate().map_err(|e| CliError::usage(e.to_string()))?;

    let profile = find_a_n(n, &cfg).map_err(|e| match e {
        StationaryError::InvalidConfig(m) => CliError::usage(m),
        other => CliError { code: EXIT_SEARCH, message: other.to_string() },
    })?;
    let mut report = validate_profile(&profile);
    match validate_with_shots(&profile, &cfg) {
        Ok(r) => report.extend(r),
        Err(e) => {
            let mut c = Check::equal("horizon_reintegration", &format!("re-integration from the horizon ({e})"), f64::NAN, 0.0);
            c.pass = false;
            report.checks.push(c);
        }
    }
    let file = SolutionFile::from_profile(&profile, report.checks.clone());
    let name = args.output.clone().unwrap_or_else(|| format!("solution_n{n}.json"));
    let zeros = profile.zero_count();
    ctx.say(format!("W_{n}: a = {:.10} (bracket width {:.1e})", profile.a_n, profile.bracket.map_or(0.0, |(a, b)| b - a)));
    ctx.say(format!("  zeros = {zeros}, limit {:+}", profile.limit_sign));
    ctx.say(format!("  ODE residual {:.2e}, trusted to r = {:.3e}", profile.residual_norm, profile.r_trust));
    let passed = report.checks.iter().filter(|c| c.pass).count();
    ctx.say(format!("  checks: {passed}/{} pass", report.checks.len()));
    for c in report.checks.iter().filter(|c| !c.pass) {
        let tag = if c.advisory { "advisory" } else { "FAILED" };
        ctx.say(format!("  {tag}: {} measured {:.3e} bound {:.3e} ({})", c.name, c.measured, c.bound, c.anchor));
    }
    persist_profile(ctx, &name, &file, &report)
}

/// Writes an accepted solution file, or dumps a rejected one next to it
/// with a `.rejected` suffix and reports the invariant violation.
fn persist_profile(ctx: &Context, name: &str, file: &SolutionFile, report: &PropertyReport) -> Result<u8, CliError> {
    if report.all_pass() {
        let path = ctx.path(name);
        write_json(&path, file).map_err(io_write)?;
        ctx.say(format!("  written to {}", path.display()));
        Ok(EXIT_OK)
    } else {
        let path = ctx.path(&format!("{name}.rejected"));
        write_json(&path, file).map_err(io_write)?;
        let failed: Vec<&str> = report.failures().map(|c| c.name.as_str()).collect();
        Err(CliError::invariant(format!("invariant violation ({}); profile dumped to {}", failed.join(", "), path.display())))
    }
}

fn file_stem(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "solution".into())
}

fn load_solution(path: &Path) -> Result<(SolutionFile, Background), CliError> {
    let file: SolutionFile = read_json(path, SOLUTION_KIND).map_err(io_usage)?;
    let bg = file.background().map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
    Ok((file, bg))
}

fn run_method(method: Method, pot: &ymlab_core::spectrum::PotentialProfile, k: usize) -> Result<SpectrumReport, CliError> {
    let r = match method {
        Method::Fd => eigen_fd(pot, k),
        Method::Shooting => eigen_shooting(pot, k),
    };
    r.map_err(|e| CliError::invariant(e.to_string()))
}

fn spectrum(ctx: &Context, args: &SpectrumArgs) -> Result<u8, CliError> {
    let (solution, bg) = load_solution(&args.solution)?;
    let settings = &ctx.config.spectrum;
    let (default_window, default_points) = default_grid(&bg);
    let window = args.window.or(settings.window).map(|[a, b]| (a, b));
    let (window, points) = match (window, args.points.or(settings.points)) {
        (Some(w), Some(p)) => (w, p),
        (Some(w), None) => (w, ((w.1 - w.0) / DEFAULT_SPACING).round() as usize + 1),
        (None, Some(p)) => (default_window, p),
        (None, None) => (default_window, default_points),
    };
    if !(window.0 < window.1) || points < 3 {
        return Err(CliError::usage(format!("window [{}, {}] with {points} points", window.0, window.1)));
    }
    let pot = build_potential(bg.clone(), window, points).map_err(|e| CliError::usage(e.to_string()))?;
    let expected = (solution.constant.is_none()).then_some(solution.n);
    let k = expected.unwrap_or(1) + settings.extra_pairs.unwrap_or(DEFAULT_EXTRA_PAIRS);
    let method = match args.method {
        MethodArg::Fd => Method::Fd,
        MethodArg::Shooting => Method::Shooting,
    };
    let report = run_method(method, &pot, k)?;
    let mut file = SpectrumFile::from_report(&report, args.solution.display().to_string(), points);
    file.integral_v = pot.integral_v;
    file.counts.expected = expected;
    file.counts.nodes = report.eigenfunctions.iter().map(|phi| node_count(phi)).collect();
    file.inequalities = check_eigenfunction_inequalities(&report, &pot);
    if method == Method::Fd {
        file.quadratic_form_residuals = quadratic_form_residuals(&report, &pot);
    }
    if solution.constant.is_none() {
        file.limit_extension_radius = Some(solution.r_trust);
    }
    if args.cross_check {
        let other = run_method(if method == Method::Fd { Method::Shooting } else { Method::Fd }, &pot, k)?;
        let per_pair = report.eigenvalues.iter().zip(&other.eigenvalues).map(|(a, b)| (a - b).abs() / a.abs()).collect();
        let max = if report.len() == other.len() { relative_disagreement(&report, &other) } else { Some(f64::INFINITY) };
        file.method_deltas = Some(MethodDeltas { per_pair, max });
    }
    if args.robustness {
        file.window_robustness = window_robustness(&pot, k).map_err(|e| CliError::invariant(e.to_string()))?;
    }

    let stem = args.output.clone().unwrap_or_else(|| format!("spectrum_{}", file_stem(&args.solution)));
    let path = ctx.path(&format!("{stem}.json"));
    write_json(&path, &file).map_err(io_write)?;
    if args.eigenfunctions {
        write_text(&ctx.path(&format!("{stem}_eigenfunctions.csv")), &eigenfunctions_csv(&report)).map_err(io_write)?;
    }

    ctx.say(format!("spectrum of {} ({:?}, window [{}, {}], h = {:.4})", solution.describe(), method, window.0, window.1, pot.h));
    if let Some(iv) = pot.integral_v {
        ctx.say(format!("  integral of V = {iv:.8}"));
    }
    ctx.say(format!("  negative eigenvalues: {}{}", report.negative_count, expected.map_or(String::new(), |n| format!(" (expected {n})"))));
    for (i, mu) in report.eigenvalues.iter().enumerate() {
        ctx.say(format!(
            "  mu_{i} = {mu:.10e}  lambda_{i} = {:.10}  error {:.1e}  nodes {}",
            report.growth_rates[i], report.error_estimates[i], file.counts.nodes[i]
        ));
    }
    if let Some(d) = &file.method_deltas {
        ctx.say(format!("  method agreement delta = {:.3e}", d.max.unwrap_or(f64::NAN)));
    }
    for c in &file.inequalities {
        if !c.skipped {
            ctx.say(format!(
                "  pair {}: P-inequality slack {:.3e}, V-inequality slack {:.3e} ({})",
                c.index,
                c.lapse_slack.unwrap_or(f64::NAN),
                c.potential_slack.unwrap_or(f64::NAN),
                if c.pass { "pass" } else { "FAIL" }
            ));
        }
    }
    if !file.window_robustness.is_empty() {
        ctx.say(format!("  window robustness max |d mu| = {:.3e}", file.window_robustness.iter().fold(0.0f64, |m, v| m.max(*v))));
    }
    ctx.say(format!("  written to {}", path.display()));

    if let Some(n) = expected {
        if n >= 1 && report.negative_count != n {
            warn!("{} negative eigenvalues about W_{n}, {n} expected", report.negative_count);
        }
        if n >= 1 && !pot.integral_v.is_some_and(|v| v < 0.0) {
            return Err(CliError::invariant(format!("integral of V = {:?} is not negative", pot.integral_v)));
        }
        if n >= 1 && report.negative_count == 0 {
            return Err(CliError::invariant("no negative eigenvalue about a solution with n >= 1"));
        }
    }
    Ok(EXIT_OK)
}

fn relative_drift(series: &[EnergyReport]) -> f64 {
    let e0 = series[0].total;
    if e0 == 0.0 {
        return 0.0;
    }
    series.iter().map(|e| (e.total - e0).abs()).fold(0.0, f64::max) / e0.abs()
}

fn evolution(ctx: &Context, args: &EvolveArgs) -> Result<u8, CliError> {
    let settings = &ctx.config.evolve;
    let (solution, bg, stem) = match (&args.solution, args.background) {
        (Some(path), _) => {
            let (file, bg) = load_solution(path)?;
            (Some(file), bg, file_stem(path))
        }
        (None, Some(BackgroundArg::Vacuum)) => (None, Background::Constant(1.0), "vacuum".to_string()),
        (None, None) => return Err(CliError::usage("evolve needs --solution FILE or --background vacuum")),
    };
    let unstable_background = solution.as_ref().is_some_and(|f| f.constant.is_none() && f.n >= 1);
    let stem = args.tag.clone().unwrap_or(stem);
    let solution_ref = args.solution.as_ref().map_or_else(|| "W = 1".to_string(), |p| p.display().to_string());

    let window = args.window.or(settings.window).map_or(DEFAULT_WINDOW, |[a, b]| (a, b));
    let points = args.points.or(settings.points).unwrap_or(DEFAULT_POINTS);
    let grid = Arc::new(EvolutionGrid::new(&bg, window, points).map_err(|e| CliError::usage(e.to_string()))?);

    let lambda_predicted = match &args.spectrum {
        Some(path) => {
            let s: SpectrumFile = read_json(path, SPECTRUM_KIND).map_err(io_usage)?;
            s.lambda0()
        }
        None if unstable_background => {
            let (w, p) = default_grid(&bg);
            let pot = build_potential(bg.clone(), w, p).map_err(|e| CliError::invariant(e.to_string()))?;
            eigen_fd(&pot, 1).map_err(|e| CliError::invariant(e.to_string()))?.growth_rates.first().copied()
        }
        None => None,
    };

    let mut perturbation = args.pulse.or(args.perturb).unwrap_or(if unstable_background { Perturbation::Mode0 } else { DEFAULT_PULSE });
    let amplitude = match (&mut perturbation, args.amplitude) {
        (Perturbation::Gauss { amplitude, .. }, Some(a)) => {
            *amplitude = a;
            a
        }
        (Perturbation::Gauss { amplitude, .. }, None) => *amplitude,
        (Perturbation::Mode0, a) => a.unwrap_or(DEFAULT_MODE_AMPLITUDE),
        (Perturbation::None, _) => 0.0,
    };
    let initial = if amplitude == 0.0 {
        FieldState::zero(grid.clone())
    } else {
        match perturbation {
            Perturbation::Mode0 => match eigenmode(grid.clone(), amplitude).map_err(|e| CliError::invariant(e.to_string()))? {
                Some((s, _)) => s,
                None if unstable_background => return Err(CliError::invariant("no unstable mode on the evolution grid")),
                None => return Err(CliError::usage("mode0 needs a background with an unstable mode")),
            },
            Perturbation::Gauss { center, width, amplitude } => {
                gaussian_pulse(grid.clone(), center, width, amplitude, PulseDirection::Static).map_err(|e| CliError::usage(e.to_string()))?
            }
            Perturbation::None => FieldState::zero(grid.clone()),
        }
    };
    let growth_expected = perturbation == Perturbation::Mode0 && amplitude != 0.0 && lambda_predicted.is_some();
    if let Some(l) = lambda_predicted.filter(|_| growth_expected) {
        let efolds = boundary_efolds(&grid, l);
        if efolds < MIN_BOUNDARY_EFOLDS {
            warn!("only {efolds:.1} e-folds of growth before boundary effects reach the well; enlarge the window");
        }
    }

    let mut cfg = EvolveConfig {
        cfl: args.cfl.or(settings.cfl).unwrap_or(DEFAULT_CFL),
        snapshot_times: args.snapshots.clone(),
        saturation: growth_expected.then_some(SATURATION),
        ..Default::default()
    };
    if let Some(t) = args.t_max.or(settings.t_max) {
        cfg.t_max = t;
    }
    if let Some(p) = settings.probe_interval {
        cfg.probe_interval = p;
    }
    let run_mode = |mode: Mode| -> Result<EvolutionRun, CliError> {
        let c = EvolveConfig { mode, ..cfg.clone() };
        evolve(&initial, &c).map_err(|e| CliError::usage(e.to_string()))
    };
    let primary_mode = if args.mode == ModeArg::Linear { Mode::Linear } else { Mode::Nonlinear };
    let run = run_mode(primary_mode)?;
    let linear = if args.mode == ModeArg::Both { Some(run_mode(Mode::Linear)?) } else { None };

    write_text(&ctx.path(&format!("series_{stem}.csv")), &series_csv(&run.series)).map_err(io_write)?;
    if let Some(l) = &linear {
        write_text(&ctx.path(&format!("series_{stem}_linear.csv")), &series_csv(&l.series)).map_err(io_write)?;
    }
    for snap in &run.snapshots {
        let name = format!("snapshot_{stem}_t{}.csv", snap.t);
        write_text(&ctx.path(&name), &snapshot_csv(&grid.x, &snap.u, &snap.pi)).map_err(io_write)?;
    }
    let fit = fit_growth(&run.series, lambda_predicted, &FitConfig::default());
    let comparison = linear.as_ref().map(|l| compare_runs(&l.series, &run.series, verify::SMALL_DEVIATION, verify::DEPARTURE_TOLERANCE));
    let growth = GrowthFile::new(solution_ref.clone(), fit, run.termination, comparison);
    let growth_path = ctx.path(&format!("growth_{stem}.json"));
    write_json(&growth_path, &growth).map_err(io_write)?;

    let last = run.series.last().expect("series has the initial sample");
    ctx.say(format!(
        "evolution about {solution_ref} ({:?}, window [{}, {}], N = {points}, dt = {:.4e})",
        primary_mode, window.0, window.1, run.dt
    ));
    ctx.say(format!("  ended at t = {:.3} ({:?})", last.t, run.termination));
    let max_u = run.series.iter().map(|e| e.max_abs_u).fold(0.0f64, f64::max);
    if amplitude == 0.0 {
        ctx.say(format!("  fixed point: max|u| = {max_u:.3e}"));
    } else {
        ctx.say(format!("  max|u| = {max_u:.3e}, relative energy change {:.3e}", relative_drift(&run.series)));
        let e0 = run.series[0].total;
        if e0 > 0.0 && !unstable_background {
            let ratio = run.series.iter().map(|e| e.total).fold(0.0f64, f64::max) / e0;
            ctx.say(format!("  max energy / initial energy = {ratio:.6}"));
        }
    }
    match (fit.status, fit.lambda_measured) {
        (FitStatus::NoGrowth, _) | (_, None) => ctx.say("  growth fit: no growth window"),
        (status, Some(m)) => ctx.say(format!(
            "  growth fit ({status:?}): lambda_measured = {m:.8}, lambda_predicted = {}, discrepancy = {}, r^2 = {:.6}",
            lambda_predicted.map_or("none".into(), |l| format!("{l:.8}")),
            fit.relative_discrepancy().map_or("n/a".into(), |d| format!("{:.3e}", d)),
            fit.r_squared.unwrap_or(f64::NAN)
        )),
    }
    if let Some(c) = comparison {
        ctx.say(format!(
            "  linear vs nonlinear: max relative difference {:.3e} while small, departure at {}, growth before departure {:.1}",
            c.max_relative_difference,
            c.departure_time.map_or("none".into(), |t| format!("t = {t:.2}")),
            c.growth_before_departure
        ));
    }
    ctx.say(format!("  written to {}", growth_path.display()));
    if growth_expected && fit.status != FitStatus::Accepted {
        return Err(CliError::invariant(format!("growth expected but the fit was {:?}", fit.status)));
    }
    Ok(EXIT_OK)
}

/// Checks on one solution file, named `file.<stem>.<check>`.
fn file_checks(path: &Path) -> Vec<Entry> {
    let stem = file_stem(path);
    let entry = |mut c: Check| {
        c.name = format!("file.{stem}.{}", c.name);
        Entry { criterion: None, check: c }
    };
    let failure = |name: &str, anchor: String| {
        let mut c = Check::equal(name, &anchor, f64::NAN, 0.0);
        c.pass = false;
        entry(c)
    };
    let file: SolutionFile = match read_json(path, SOLUTION_KIND) {
        Ok(f) => f,
        Err(e) => return vec![failure("load", e.to_string())],
    };
    if let Some(v) = file.constant {
        return vec![entry(Check::equal("constant_solution", "constant W in {-1, 0, 1}", v.abs().min((v.abs() - 1.0).abs()), 0.0))];
    }
    match file.to_profile() {
        Ok(p) => validate_profile(&p).checks.into_iter().map(entry).collect(),
        Err(e) => vec![failure("consistency", format!("{}: {e}", path.display()))],
    }
}

fn verification(ctx: &Context, args: &VerifyArgs) -> Result<u8, CliError> {
    let options = SuiteOptions {
        n_max: args.n_max.or(ctx.config.verify.n_max).unwrap_or(3),
        stationary: ctx.config.stationary.clone(),
        filter: args.filter.clone(),
    };
    if options.n_max == 0 {
        return Err(CliError::usage("--n-max must be at least 1"));
    }
    let mut report = verify::run(&options);
    for path in &args.solution {
        report
            .checks
            .extend(file_checks(path).into_iter().filter(|e| args.filter.as_deref().is_none_or(|f| e.check.name.contains(f))));
    }
    let pass = report.failures().next().is_none();
    report.pass = pass;
    let text = to_json_string(&report);
    write_text(&ctx.path("verify.json"), &text).map_err(io_write)?;
    print!("{text}");
    if !ctx.quiet {
        let passed = report.checks.iter().filter(|e| e.check.pass).count();
        eprintln!("verify: {passed}/{} checks pass", report.checks.len());
        for e in report.checks.iter().filter(|e| !e.check.pass) {
            let tag = if e.check.advisory { "advisory" } else { "FAILED" };
            eprintln!("  {tag}: {} measured {:.3e} bound {:.3e}", e.check.name, e.check.measured, e.check.bound);
        }
    }
    Ok(if report.pass { EXIT_OK } else { EXIT_VERIFY })
}

#[cfg(test)]
mod tests {
    use super::*;
    use ymlab_core::stationary::StationaryProfile;

    fn context(dir: &Path) -> Context<'_> {
        Context { out_dir: dir, quiet: true, config: RunConfig::default() }
    }

    #[test]
    fn failing_profile_is_dumped_as_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let ctx = context(dir.path());
        let profile = StationaryProfile::constant(1.0).unwrap();
        let file = SolutionFile::from_profile(&profile, Vec::new());
        let report = PropertyReport { checks: vec![Check::at_most("bounded", "|W| <= 1", 2.0, 1.0)] };
        let err = persist_profile(&ctx, "w.json", &file, &report).unwrap_err();
        assert_eq!(err.code, crate::EXIT_INVARIANT);
        assert!(err.message.contains("bounded"));
        assert!(dir.path().join("w.json.rejected").exists());
        assert!(!dir.path().join("w.json").exists());
    }

    #[test]
    fn advisory_failures_do_not_reject() {
        let dir = tempfile::tempdir().unwrap();
        let ctx = context(dir.path());
        let file = SolutionFile::constant(1.0).unwrap();
        let report = PropertyReport { checks: vec![Check::at_most("loose", "advisory bound", 2.0, 1.0).advisory()] };
        assert_eq!(persist_profile(&ctx, "w.json", &file, &report).unwrap(), EXIT_OK);
        assert!(dir.path().join("w.json").exists());
    }

    #[test]
    fn relative_drift_of_constant_series_is_zero() {
        let e = EnergyReport { t: 0.0, total: 2.0, kinetic: 0.0, gradient: 1.0, potential: 1.0, deviation_norm: 1.0, max_abs_u: 1.0 };
        assert_eq!(relative_drift(&[e, EnergyReport { t: 1.0, ..e }]), 0.0);
        assert_eq!(relative_drift(&[EnergyReport { total: 0.0, ..e }]), 0.0);
    }
}
