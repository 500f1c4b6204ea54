//! Run configuration: one TOML file feeding every subcommand.
//!
//! Key names are stable so runs can be reproduced from configs alone:
//! `material.n0`, `modulator.v_pi`, `channel.v_a`, `channel.t`,
//! `channel.eps`, `channel.eta`, `channel.v_el`, `channel.beta`,
//! `channel.f_rep`, `grid.t_values`, `grid.k_values`, `grid.eps_values`,
//! `monitor.window`, `monitor.threshold`, `seed`.

use cvqkd_pe::gmcs_channel::ChannelParams;
use cvqkd_pe::monitor::MonitorConfig;
use cvqkd_pe::mzm::ModulatorParams;
use cvqkd_pe::pe_model::MaterialParams;
use cvqkd_pe::scenario::ScenarioGrid;
use serde::{Deserialize, Serialize};
use std::path::PathBuf;

use crate::CliError;

/// Bundled defaults (congruent LN demo constants, reference channel).
pub const DEFAULT_CONFIG_TOML: &str = include_str!("../../../configs/default.toml");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSection {
    pub t_values: Vec<f64>,
    pub k_values: Vec<f64>,
    pub eps_values: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonitorSection {
    pub window: usize,
    pub threshold: f64,
}

/// Voltage grid and phase-shift list for transfer-curve outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransferSection {
    pub dphi_values: Vec<f64>,
    pub v_min: f64,
    pub v_max: f64,
    pub points: usize,
}

impl Default for TransferSection {
    fn default() -> Self {
        Self {
            dphi_values: vec![0.0, 0.3, 0.6, 1.0],
            v_min: -6.0,
            v_max: 6.0,
            points: 241,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub seed: u64,
    pub material: MaterialParams,
    pub modulator: ModulatorParams,
    pub channel: ChannelParams,
    pub grid: GridSection,
    pub monitor: MonitorSection,
    #[serde(default)]
    pub transfer: TransferSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_path: Option<PathBuf>,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let config: RunConfig =
            toml::from_str(text).map_err(|e| CliError::ConfigParse(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: Option<&std::path::Path>) -> Result<Self, CliError> {
        match path {
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| {
                    CliError::ConfigParse(format!("cannot read {}: {e}", p.display()))
                })?;
                Self::parse(&text)
            }
            None => Self::parse(DEFAULT_CONFIG_TOML),
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.material
            .validate()
            .map_err(|e| CliError::ConfigParse(e.to_string()))?;
        self.modulator
            .validate()
            .map_err(|e| CliError::ConfigParse(e.to_string()))?;
        self.channel
            .validate()
            .map_err(|e| CliError::ConfigParse(e.to_string()))?;
        self.scenario_grid()
            .validate()
            .map_err(|e| CliError::ConfigParse(e.to_string()))?;
        self.monitor_config()
            .validate()
            .map_err(|e| CliError::ConfigParse(e.to_string()))?;
        if self.transfer.points < 2 {
            return Err(CliError::ConfigParse(
                "transfer.points must be at least 2".into(),
            ));
        }
        if self.transfer.v_max <= self.transfer.v_min
            || self.transfer.v_max.is_nan()
            || self.transfer.v_min.is_nan()
        {
            return Err(CliError::ConfigParse(
                "transfer.v_max must exceed transfer.v_min".into(),
            ));
        }
        Ok(())
    }

    pub fn scenario_grid(&self) -> ScenarioGrid {
        ScenarioGrid {
            t_values: self.grid.t_values.clone(),
            k_values: self.grid.k_values.clone(),
            eps_values: self.grid.eps_values.clone(),
            base: self.channel,
        }
    }

    pub fn monitor_config(&self) -> MonitorConfig {
        MonitorConfig {
            window: self.monitor.window,
            threshold: self.monitor.threshold,
            reference: self.channel,
        }
    }

    pub fn transfer_voltages(&self) -> Vec<f64> {
        let n = self.transfer.points;
        let step = (self.transfer.v_max - self.transfer.v_min) / (n - 1) as f64;
        (0..n).map(|j| self.transfer.v_min + step * j as f64).collect()
    }
}

/// Fiber-loss view: T = 10^(−0.02·d_km) at the standard 0.2 dB/km.
pub const FIBER_LOSS_DB_PER_KM: f64 = 0.2;

pub fn transmittance_from_km(d_km: f64) -> f64 {
    10f64.powf(-FIBER_LOSS_DB_PER_KM / 10.0 * d_km)
}
