//! Optional JSON configuration read with `--config`; command-line flags
//! override its values.

use std::path::Path;

use serde::Deserialize;
use ymlab_core::stationary::StationaryConfig;

use crate::CliError;

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub stationary: StationaryConfig,
    pub spectrum: SpectrumSettings,
    pub evolve: EvolveSettings,
    pub verify: VerifySettings,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpectrumSettings {
    pub window: Option<[f64; 2]>,
    pub points: Option<usize>,
    /// Eigenpairs requested beyond the expected n.
    pub extra_pairs: Option<usize>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvolveSettings {
    pub window: Option<[f64; 2]>,
    pub points: Option<usize>,
    pub cfl: Option<f64>,
    pub t_max: Option<f64>,
    pub probe_interval: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifySettings {
    pub n_max: Option<usize>,
}

impl RunConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
        let mut cfg: Self = serde_json::from_str(&text).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
        cfg.stationary = cfg.stationary.synced();
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.stationary.validate().map_err(|e| CliError::usage(e.to_string()))?;
        let positive = |name: &str, v: Option<f64>| match v {
            Some(x) if !(x > 0.0 && x.is_finite()) => Err(CliError::usage(format!("{name} must be positive, got {x}"))),
            _ => Ok(()),
        };
        positive("evolve.cfl", self.evolve.cfl)?;
        positive("evolve.t_max", self.evolve.t_max)?;
        positive("evolve.probe_interval", self.evolve.probe_interval)?;
        for (name, w) in [("spectrum.window", self.spectrum.window), ("evolve.window", self.evolve.window)] {
            if let Some([lo, hi]) = w {
                if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
                    return Err(CliError::usage(format!("{name} [{lo}, {hi}] is not an interval")));
                }
            }
        }
        Ok(())
    }
}
