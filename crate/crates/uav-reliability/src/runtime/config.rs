//! Mission configuration: threshold, horizon, tree source and the component
//! parameter records.

use super::RuntimeError;
use crate::fault_tree::{parse_fault_tree, FaultTree};
use crate::models::{BatteryParams, MotorConfiguration, ProcessorParams, PropulsionParams};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

/// Fault-tree document used when the configuration names no file.
pub const DEFAULT_TREE_DOCUMENT: &str = include_str!("../../assets/uav_small.ft");

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct PropulsionSettings {
    pub configuration: MotorConfiguration,
    pub motor_failure_rate_per_h: f64,
}

impl Default for PropulsionSettings {
    fn default() -> Self {
        let p = PropulsionParams::default();
        PropulsionSettings {
            configuration: p.configuration,
            motor_failure_rate_per_h: p.motor_failure_rate,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct BatterySettings {
    pub failure_rate_per_h: f64,
    pub degradation_rate_per_h: f64,
    pub usage_rate_per_h: f64,
    pub inactivity_rate_per_h: f64,
}

impl Default for BatterySettings {
    fn default() -> Self {
        let b = BatteryParams::default();
        BatterySettings {
            failure_rate_per_h: b.failure_rate,
            degradation_rate_per_h: b.degradation_rate,
            usage_rate_per_h: b.usage_rate,
            inactivity_rate_per_h: b.inactivity_rate,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct ProcessorSettings {
    pub mttf_ref_h: f64,
    pub activation_energy_ev: f64,
    pub boltzmann_ev_per_k: f64,
    pub ref_temperature_c: f64,
    pub utilization: f64,
}

impl Default for ProcessorSettings {
    fn default() -> Self {
        let p = ProcessorParams::default();
        ProcessorSettings {
            mttf_ref_h: p.mttf_ref,
            activation_energy_ev: p.activation_energy,
            boltzmann_ev_per_k: p.boltzmann,
            ref_temperature_c: p.ref_temperature,
            utilization: p.utilization,
        }
    }
}

/// Everything a replay needs besides the telemetry itself.
///
/// The JSON file format mirrors this struct field for field; omitted
/// fields take the defaults below.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct MissionConfig {
    /// Abort threshold on the system failure probability (strictly-greater
    /// comparison).
    pub threshold: f64,
    /// Expected telemetry cadence, seconds.
    pub sample_period_s: f64,
    /// Forward window over which each leaf's failure probability is
    /// evaluated from its current symptom-derived state, hours.
    pub evaluation_horizon_h: f64,
    /// Fault-tree document path; `None` uses the built-in default tree.
    pub tree_path: Option<PathBuf>,
    pub propulsion: PropulsionSettings,
    pub battery: BatterySettings,
    pub processor: ProcessorSettings,
}

impl Default for MissionConfig {
    fn default() -> Self {
        MissionConfig {
            threshold: 0.9,
            sample_period_s: 1.0,
            evaluation_horizon_h: 100.0,
            tree_path: None,
            propulsion: PropulsionSettings::default(),
            battery: BatterySettings::default(),
            processor: ProcessorSettings::default(),
        }
    }
}

impl MissionConfig {
    pub fn validate(&self) -> Result<(), RuntimeError> {
        if self.threshold.is_nan() || self.threshold <= 0.0 || self.threshold >= 1.0 {
            return Err(RuntimeError::InvalidConfig(format!(
                "threshold {} must lie strictly between 0 and 1",
                self.threshold
            )));
        }
        if self.sample_period_s.is_nan() || self.sample_period_s <= 0.0 {
            return Err(RuntimeError::InvalidConfig(format!(
                "sample period {} must be positive",
                self.sample_period_s
            )));
        }
        if self.evaluation_horizon_h.is_nan() || self.evaluation_horizon_h <= 0.0 {
            return Err(RuntimeError::InvalidConfig(format!(
                "evaluation horizon {} must be positive",
                self.evaluation_horizon_h
            )));
        }
        self.propulsion_params()?;
        self.battery_params()?;
        self.processor_params()?;
        Ok(())
    }

    pub fn propulsion_params(&self) -> Result<PropulsionParams, RuntimeError> {
        Ok(PropulsionParams::new(
            self.propulsion.configuration,
            self.propulsion.motor_failure_rate_per_h,
        )?)
    }

    pub fn battery_params(&self) -> Result<BatteryParams, RuntimeError> {
        Ok(BatteryParams::new(
            self.battery.failure_rate_per_h,
            self.battery.degradation_rate_per_h,
            self.battery.usage_rate_per_h,
            self.battery.inactivity_rate_per_h,
        )?)
    }

    pub fn processor_params(&self) -> Result<ProcessorParams, RuntimeError> {
        Ok(ProcessorParams::new(
            self.processor.mttf_ref_h,
            self.processor.activation_energy_ev,
            self.processor.boltzmann_ev_per_k,
            self.processor.ref_temperature_c,
            self.processor.utilization,
        )?)
    }

    /// Reads and validates a JSON configuration file.
    pub fn load(path: &Path) -> Result<Self, RuntimeError> {
        let text = std::fs::read_to_string(path)?;
        let config: MissionConfig = serde_json::from_str(&text)?;
        config.validate()?;
        Ok(config)
    }

    /// Parses the configured tree document (or the built-in default).
    pub fn load_tree(&self) -> Result<FaultTree, RuntimeError> {
        match &self.tree_path {
            Some(path) => {
                let text = std::fs::read_to_string(path)?;
                Ok(parse_fault_tree(&text)?)
            }
            None => Ok(parse_fault_tree(DEFAULT_TREE_DOCUMENT)?),
        }
    }
}
