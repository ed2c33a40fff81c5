//! Propulsion-system Markov models for three motor configurations.
//!
//! Each configuration encodes motor rotation directions (P clockwise, N
//! anticlockwise) and determines which single-motor losses leave the
//! airframe controllable:
//!
//! - `PNPN` (quadcopter): no motor loss is tolerable. One state transition
//!   `AllOk -(4λ)-> Failure`.
//! - `PNPNPN` (hexacopter): any single motor loss is tolerable. Chain
//!   `AllOk -(6λ)-> OneMotorOut -(5λ)-> Failure`.
//! - `PPNNPN` (hexacopter): half of the single-motor losses are tolerable.
//!   `AllOk -(3λ)-> TolerableMotorOut -(5λ)-> Failure` plus a direct
//!   `AllOk -(3λ)-> Failure` edge for the intolerable losses.
//!
//! The structures and the PPNNPN tolerable set are shipped defaults; trees
//! can override them with a custom chain in the model document.

use super::{ModelsError, MotorStatus};
use crate::markov::MarkovModel;
use serde::{Deserialize, Serialize};
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MotorConfiguration {
    #[serde(rename = "PNPN")]
    Pnpn,
    #[serde(rename = "PNPNPN")]
    Pnpnpn,
    #[serde(rename = "PPNNPN")]
    Ppnnpn,
}

impl MotorConfiguration {
    pub fn motor_count(self) -> usize {
        match self {
            MotorConfiguration::Pnpn => 4,
            MotorConfiguration::Pnpnpn => 6,
            MotorConfiguration::Ppnnpn => 6,
        }
    }

    /// Rotation-direction pattern, one letter per motor.
    pub fn pattern(self) -> &'static str {
        match self {
            MotorConfiguration::Pnpn => "PNPN",
            MotorConfiguration::Pnpnpn => "PNPNPN",
            MotorConfiguration::Ppnnpn => "PPNNPN",
        }
    }

    /// Motor indices whose individual loss keeps the airframe controllable.
    pub fn tolerable_single_losses(self) -> &'static [usize] {
        match self {
            MotorConfiguration::Pnpn => &[],
            MotorConfiguration::Pnpnpn => &[0, 1, 2, 3, 4, 5],
            MotorConfiguration::Ppnnpn => &[0, 2, 4],
        }
    }
}

impl FromStr for MotorConfiguration {
    type Err = ModelsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "PNPN" => Ok(MotorConfiguration::Pnpn),
            "PNPNPN" => Ok(MotorConfiguration::Pnpnpn),
            "PPNNPN" => Ok(MotorConfiguration::Ppnnpn),
            other => Err(ModelsError::UnknownConfiguration(other.into())),
        }
    }
}

impl std::fmt::Display for MotorConfiguration {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.pattern())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropulsionParams {
    pub configuration: MotorConfiguration,
    /// Per-motor failure rate, 1/hour.
    pub motor_failure_rate: f64,
}

impl PropulsionParams {
    pub fn new(
        configuration: MotorConfiguration,
        motor_failure_rate: f64,
    ) -> Result<Self, ModelsError> {
        if !motor_failure_rate.is_finite() || motor_failure_rate <= 0.0 {
            return Err(ModelsError::NonPositive {
                name: "motor failure rate",
                value: motor_failure_rate,
            });
        }
        Ok(PropulsionParams {
            configuration,
            motor_failure_rate,
        })
    }
}

impl Default for PropulsionParams {
    /// Quadcopter at λ = 0.001/h.
    fn default() -> Self {
        PropulsionParams {
            configuration: MotorConfiguration::Pnpn,
            motor_failure_rate: 0.001,
        }
    }
}

/// Absorbing Markov model for the configured propulsion system.
pub fn build_propulsion_model(params: &PropulsionParams) -> MarkovModel {
    let rate = params.motor_failure_rate;
    let motors = params.configuration.motor_count() as f64;
    let tolerable = params.configuration.tolerable_single_losses().len() as f64;
    let model = if tolerable == 0.0 {
        MarkovModel::from_rates(
            &["AllOk", "Failure"],
            &[("AllOk", "Failure", motors * rate)],
            &["Failure"],
        )
    } else {
        let mid = if tolerable == motors {
            "OneMotorOut"
        } else {
            "TolerableMotorOut"
        };
        let mut transitions = vec![
            ("AllOk", mid, tolerable * rate),
            (mid, "Failure", (motors - 1.0) * rate),
        ];
        if tolerable < motors {
            transitions.push(("AllOk", "Failure", (motors - tolerable) * rate));
        }
        MarkovModel::from_rates(&["AllOk", mid, "Failure"], &transitions, &["Failure"])
    };
    model.expect("catalogued propulsion structure is valid")
}

/// Index of the model state matching an observed motor pattern.
///
/// Failure patterns beyond the configuration's tolerance map to the
/// absorbing state.
pub fn propulsion_state_from_symptom(
    configuration: MotorConfiguration,
    motor_status: &[MotorStatus],
) -> Result<usize, ModelsError> {
    if motor_status.len() != configuration.motor_count() {
        return Err(ModelsError::LengthMismatch {
            expected: configuration.motor_count(),
            actual: motor_status.len(),
        });
    }
    let failed: Vec<usize> = motor_status
        .iter()
        .enumerate()
        .filter(|(_, &s)| s == MotorStatus::Failed)
        .map(|(i, _)| i)
        .collect();
    let has_mid_state = !configuration.tolerable_single_losses().is_empty();
    let absorbing = if has_mid_state { 2 } else { 1 };
    Ok(match failed.len() {
        0 => 0,
        1 if configuration.tolerable_single_losses().contains(&failed[0]) => 1,
        _ => absorbing,
    })
}
