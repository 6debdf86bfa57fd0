//! Solution and spectrum files written and read back.

use std::sync::Arc;

use ymlab_core::io::{read_json, write_json, SolutionFile, SpectrumFile, SOLUTION_KIND, SPECTRUM_KIND};
use ymlab_core::spectrum::{build_potential, default_grid, eigen_fd, Background};
use ymlab_core::stationary::{find_a_n, validate_profile, StationaryConfig};

#[test]
fn w1_profile_survives_a_file_roundtrip() {
    let profile = find_a_n(1, &StationaryConfig::default()).unwrap();
    let checks = validate_profile(&profile).checks;
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("w1.json");
    write_json(&path, &SolutionFile::from_profile(&profile, checks.clone())).unwrap();
    let file: SolutionFile = read_json(&path, SOLUTION_KIND).unwrap();
    assert_eq!(file.checks, checks);
    let back = file.to_profile().unwrap();
    assert_eq!(back.a_n, profile.a_n);
    assert_eq!(back.rho, profile.rho);
    assert_eq!(back.residual_norm, profile.residual_norm);
    assert_eq!(back.classification_log, profile.classification_log);
    for k in 0..=400 {
        let r = 1.0 + 10f64.powf(-7.0 + 14.0 * k as f64 / 400.0);
        assert_eq!(back.eval(r), profile.eval(r), "r = {r}");
    }
    assert!(validate_profile(&back).all_pass());
}

#[test]
fn spectrum_file_roundtrip() {
    let profile = Arc::new(find_a_n(1, &StationaryConfig::default()).unwrap());
    let bg = Background::Profile(profile);
    let (window, points) = default_grid(&bg);
    let pot = build_potential(bg, window, points).unwrap();
    let report = eigen_fd(&pot, 3).unwrap();
    let mut file = SpectrumFile::from_report(&report, "w1.json".into(), points);
    file.integral_v = pot.integral_v;
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.json");
    write_json(&path, &file).unwrap();
    let back: SpectrumFile = read_json(&path, SPECTRUM_KIND).unwrap();
    assert_eq!(back, file);
    assert_eq!(back.lambda0(), report.growth_rates.first().copied());
    assert!(read_json::<SolutionFile>(&path, SOLUTION_KIND).is_err());
}
