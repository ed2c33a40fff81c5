//! Concrete component reliability models and their symptom mappings.
//!
//! Three model families cover the dynamic leaves of the shipped fault trees:
//! multirotor propulsion ([`build_propulsion_model`]), banded battery
//! degradation ([`build_battery_model`]) and Arrhenius-derated processor
//! lifetime ([`processor_mttf`]). Each family maps a runtime observable
//! (motor status, battery level, temperature) onto model state, so the
//! models can be re-initialized mid-mission.
//!
//! Everything here is a pure function over immutable parameter records.

mod battery;
mod processor;
mod propulsion;

pub use battery::{
    battery_state_from_level, build_battery_model, build_battery_model_for, Activity,
    BatteryParams, BATTERY_BAND_LABELS,
};
pub use processor::{
    arrhenius_acceleration, processor_failure_probability, processor_mttf, ProcessorParams,
    TemperatureSegment, CELSIUS_TO_KELVIN_OFFSET,
};
pub use propulsion::{
    build_propulsion_model, propulsion_state_from_symptom, MotorConfiguration, PropulsionParams,
};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ModelsError {
    #[error("unknown motor configuration `{0}` (expected PNPN, PNPNPN or PPNNPN)")]
    UnknownConfiguration(String),
    #[error("{name} must be positive, got {value}")]
    NonPositive { name: &'static str, value: f64 },
    #[error("{name} must be non-negative, got {value}")]
    Negative { name: &'static str, value: f64 },
    #[error("motor status has {actual} entries, configuration expects {expected}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("battery level {0} outside [0, 100]")]
    LevelOutOfRange(f64),
    #[error("temperature {0} C is at or below absolute zero")]
    NonphysicalTemperature(f64),
    #[error("temperature history segment has negative duration {0}")]
    NegativeDuration(f64),
    #[error("utilization {0} outside [0, 1]")]
    UtilizationOutOfRange(f64),
}

/// Per-motor health as reported by the monitoring layer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MotorStatus {
    Operational,
    Failed,
}

impl MotorStatus {
    pub fn as_char(self) -> char {
        match self {
            MotorStatus::Operational => 'O',
            MotorStatus::Failed => 'F',
        }
    }

    pub fn from_char(c: char) -> Option<Self> {
        match c {
            'O' => Some(MotorStatus::Operational),
            'F' => Some(MotorStatus::Failed),
            _ => None,
        }
    }
}

/// One snapshot of the observables that feed the component models.
#[derive(Debug, Clone)]
pub struct SymptomReading {
    pub configuration: MotorConfiguration,
    pub motor_status: Vec<MotorStatus>,
    /// Percent in [0, 100].
    pub battery_level: f64,
    /// Degrees Celsius.
    pub processor_temp: f64,
}

impl SymptomReading {
    pub fn new(
        configuration: MotorConfiguration,
        motor_status: Vec<MotorStatus>,
        battery_level: f64,
        processor_temp: f64,
    ) -> Result<Self, ModelsError> {
        if motor_status.len() != configuration.motor_count() {
            return Err(ModelsError::LengthMismatch {
                expected: configuration.motor_count(),
                actual: motor_status.len(),
            });
        }
        if !(0.0..=100.0).contains(&battery_level) {
            return Err(ModelsError::LevelOutOfRange(battery_level));
        }
        if processor_temp <= -CELSIUS_TO_KELVIN_OFFSET {
            return Err(ModelsError::NonphysicalTemperature(processor_temp));
        }
        Ok(SymptomReading {
            configuration,
            motor_status,
            battery_level,
            processor_temp,
        })
    }

    /// Propulsion-model state index matching the observed motor pattern.
    pub fn propulsion_state(&self) -> Result<usize, ModelsError> {
        propulsion_state_from_symptom(self.configuration, &self.motor_status)
    }

    /// Battery-model band index matching the observed level.
    pub fn battery_band(&self) -> Result<usize, ModelsError> {
        battery_state_from_level(self.battery_level)
    }
}
