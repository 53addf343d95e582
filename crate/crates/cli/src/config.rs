//! Run configuration: a versioned JSON document. Every section is optional
//! and falls back to the default hardware parameters and the built-in grids.

use std::fs;
use std::path::{Path, PathBuf};

use qrep::elink::{LossParams, Strategy, SwapConfig};
use qrep::fock::{BeamSplitterConvention, ClickPattern};
use qrep::rates::HardwareParams;
use qrep::sweep::{default_distances, linspace, Architecture, Grids, Regime, Scenario};
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: u32,
    pub seed: u64,
    pub out_dir: PathBuf,
    pub hardware: HardwareParams,
    pub swap: SwapSettings,
    /// Operating point for `elink` and the fidelity sweep.
    pub link: LinkPoint,
    /// Strategies reported by `elink`.
    pub strategies: Vec<Strategy>,
    /// Scenarios of the keyrate and edr sweeps.
    pub scenarios: Vec<Scenario>,
    /// Regimes of the partition and brightness sweeps.
    pub regimes: Vec<Regime>,
    pub grids: Grids,
    pub distances_km: Vec<f64>,
    pub fidelity: FidelitySweep,
    pub partition: PartitionSweep,
    pub brightness: BrightnessSweep,
    /// Monte Carlo trials per point in `validate`.
    pub mc_trials: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SwapSettings {
    pub convention: BeamSplitterConvention,
    pub pattern: ClickPattern,
}

impl SwapSettings {
    /// Swap configuration; strategies pick their own detector.
    pub fn config(&self) -> SwapConfig {
        SwapConfig {
            convention: self.convention,
            pattern: self.pattern,
            ..SwapConfig::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LinkPoint {
    pub q: f64,
    pub lambda: f64,
    pub epsilon_r: f64,
    pub epsilon_l: f64,
}

impl Default for LinkPoint {
    fn default() -> Self {
        Self {
            q: 0.1,
            lambda: 0.1,
            epsilon_r: 0.5,
            epsilon_l: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FidelitySweep {
    pub epsilon_l: Vec<f64>,
}

impl Default for FidelitySweep {
    fn default() -> Self {
        Self {
            epsilon_l: linspace(0.0, 0.9, 21),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PartitionSweep {
    pub strategy: Strategy,
    pub distances_km: Vec<f64>,
}

impl Default for PartitionSweep {
    fn default() -> Self {
        Self {
            strategy: Strategy::PnrEpl,
            distances_km: default_distances(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BrightnessSweep {
    pub architecture: Architecture,
    pub strategy: Strategy,
    pub hops: usize,
    pub d_km: f64,
}

impl Default for BrightnessSweep {
    fn default() -> Self {
        Self {
            architecture: Architecture::Hybrid,
            strategy: Strategy::PnrEpl,
            hops: 0,
            d_km: 10.0,
        }
    }
}

/// Atom baseline with EPL and the hybrid chain with PNR+EPL, for every
/// default regime and hop count.
pub fn default_scenarios() -> Vec<Scenario> {
    let mut out = Vec::new();
    for regime in Regime::defaults() {
        for hops in 0..=qrep::sweep::MAX_HOPS {
            for (architecture, strategy) in [
                (Architecture::Atom, Strategy::Epl),
                (Architecture::Hybrid, Strategy::PnrEpl),
            ] {
                out.push(Scenario {
                    architecture,
                    strategy,
                    hops,
                    regime: regime.clone(),
                });
            }
        }
    }
    out
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            seed: 0,
            out_dir: PathBuf::from("out"),
            hardware: HardwareParams::default(),
            swap: SwapSettings::default(),
            link: LinkPoint::default(),
            strategies: Strategy::ALL.to_vec(),
            scenarios: default_scenarios(),
            regimes: Regime::defaults(),
            grids: Grids::default(),
            distances_km: default_distances(),
            fidelity: FidelitySweep::default(),
            partition: PartitionSweep::default(),
            brightness: BrightnessSweep::default(),
            mc_trials: 100_000,
        }
    }
}

fn config_error(key: &str, reason: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("`{key}`: {reason}"))
}

fn check_distances(key: &str, d: &[f64]) -> Result<(), CliError> {
    if let Some(v) = d.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
        return Err(config_error(key, format!("distance {v} must be positive")));
    }
    Ok(())
}

impl RunConfig {
    /// Schema and constraint checks. Errors name the offending key.
    pub fn validate(&self) -> Result<(), CliError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(config_error(
                "schema_version",
                format!(
                    "unsupported version {}, expected {SCHEMA_VERSION}",
                    self.schema_version
                ),
            ));
        }
        self.hardware
            .validate()
            .map_err(|e| config_error(&param_key("hardware", &e), e))?;
        LossParams::symmetric(self.link.epsilon_r, self.link.epsilon_l)
            .map_err(|e| config_error("link", e))?;
        for (key, v) in [("link.q", self.link.q), ("link.lambda", self.link.lambda)] {
            if !(0.0..1.0).contains(&v) {
                return Err(config_error(key, format!("{v} is outside [0, 1)")));
            }
        }
        if self.strategies.is_empty() {
            return Err(config_error("strategies", "empty strategy list"));
        }
        for (k, s) in self.scenarios.iter().enumerate() {
            s.validate()
                .map_err(|e| config_error(&format!("scenarios[{k}]"), e))?;
        }
        if self.regimes.is_empty() {
            return Err(config_error("regimes", "empty regime list"));
        }
        for (k, r) in self.regimes.iter().enumerate() {
            r.apply(&self.hardware)
                .validate()
                .map_err(|e| config_error(&format!("regimes[{k}]"), e))?;
        }
        self.grids
            .validate()
            .map_err(|e| config_error(&param_key("grids", &e), e))?;
        check_distances("distances_km", &self.distances_km)?;
        check_distances("partition.distances_km", &self.partition.distances_km)?;
        if !(self.brightness.d_km.is_finite() && self.brightness.d_km > 0.0) {
            return Err(config_error("brightness.d_km", "must be positive"));
        }
        if let Some(v) = self
            .fidelity
            .epsilon_l
            .iter()
            .find(|v| !(0.0..=1.0).contains(*v))
        {
            return Err(config_error(
                "fidelity.epsilon_l",
                format!("{v} is outside [0, 1]"),
            ));
        }
        if self.mc_trials == 0 {
            return Err(config_error("mc_trials", "must be positive"));
        }
        Ok(())
    }
}

fn param_key(section: &str, e: &qrep::Error) -> String {
    match e {
        qrep::Error::InvalidParameter { name, .. }
        | qrep::Error::InvalidProbability { name, .. } => {
            format!("{section}.{name}")
        }
        _ => section.to_string(),
    }
}

/// Reads and validates a config file.
pub fn parse_config(path: &Path) -> Result<RunConfig, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let cfg: RunConfig = serde_json::from_str(&text)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    cfg.validate()?;
    Ok(cfg)
}
