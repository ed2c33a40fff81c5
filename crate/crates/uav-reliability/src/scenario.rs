//! Seeded telemetry generators for two mission profiles.
//!
//! The fault-free profile drains the battery smoothly from 100% to a
//! landing reserve while the processor temperature hovers around its
//! nominal value with bounded sensor noise. The faulty profile follows the
//! same shape until the battery fault instant `X`, where the level steps
//! sharply down, and from the overheat instant `Y` (`Y > X`) the
//! temperature climbs linearly on top of the noise.
//!
//! Generation is deterministic for a fixed seed, and levels and
//! temperatures are rounded to two decimals so that generated streams
//! survive CSV round-trips exactly.

use crate::models::{Activity, MotorConfiguration, MotorStatus};
use crate::runtime::TelemetrySample;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("invalid scenario: {0}")]
    InvalidSpec(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScenarioKind {
    FaultFree,
    Faulty,
}

#[derive(Debug, Clone)]
pub struct ScenarioSpec {
    pub kind: ScenarioKind,
    /// Mission length in seconds; one sample per second starting at 0.
    pub duration_s: u32,
    /// Battery fault instant `X` (faulty kind only).
    pub battery_fault_at_s: Option<u32>,
    /// Overheat onset `Y` (faulty kind only); must exceed `X`.
    pub overheat_at_s: Option<u32>,
    /// Battery level immediately before the fault.
    pub drop_from_pct: f64,
    /// Battery level immediately after the fault.
    pub drop_to_pct: f64,
    /// Fault-free end-of-mission battery level.
    pub landing_reserve_pct: f64,
    /// Half-width of the uniform temperature sensor noise.
    pub temp_noise_amplitude_c: f64,
    /// Overheat climb rate after `Y`.
    pub overheat_ramp_c_per_s: f64,
    /// Nominal processor temperature.
    pub nominal_temp_c: f64,
    pub configuration: MotorConfiguration,
}

impl ScenarioSpec {
    pub fn fault_free(duration_s: u32) -> Self {
        ScenarioSpec {
            kind: ScenarioKind::FaultFree,
            duration_s,
            battery_fault_at_s: None,
            overheat_at_s: None,
            drop_from_pct: 80.0,
            drop_to_pct: 40.0,
            landing_reserve_pct: 70.0,
            temp_noise_amplitude_c: 0.15,
            overheat_ramp_c_per_s: 0.35,
            nominal_temp_c: 29.0,
            configuration: MotorConfiguration::Pnpn,
        }
    }

    pub fn faulty(duration_s: u32, battery_fault_at_s: u32, overheat_at_s: u32) -> Self {
        ScenarioSpec {
            kind: ScenarioKind::Faulty,
            battery_fault_at_s: Some(battery_fault_at_s),
            overheat_at_s: Some(overheat_at_s),
            ..ScenarioSpec::fault_free(duration_s)
        }
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        let fail = |msg: String| Err(ScenarioError::InvalidSpec(msg));
        if self.duration_s == 0 {
            return fail("duration must be at least 1 second".into());
        }
        if !(0.0..100.0).contains(&self.landing_reserve_pct) {
            return fail(format!(
                "landing reserve {} must lie in [0, 100)",
                self.landing_reserve_pct
            ));
        }
        if self.temp_noise_amplitude_c < 0.0 {
            return fail("noise amplitude must be non-negative".into());
        }
        match self.kind {
            ScenarioKind::FaultFree => {
                if self.battery_fault_at_s.is_some() || self.overheat_at_s.is_some() {
                    return fail("fault instants do not apply to a fault-free scenario".into());
                }
            }
            ScenarioKind::Faulty => {
                let x = self.battery_fault_at_s.ok_or_else(|| {
                    ScenarioError::InvalidSpec("missing battery fault instant".into())
                })?;
                let y = self
                    .overheat_at_s
                    .ok_or_else(|| ScenarioError::InvalidSpec("missing overheat instant".into()))?;
                if x == 0 {
                    return fail("battery fault instant must be positive".into());
                }
                if y <= x {
                    return fail(format!(
                        "overheat instant {y} must come after the battery fault at {x}"
                    ));
                }
                if y >= self.duration_s {
                    return fail(format!(
                        "overheat instant {y} must lie inside the {}-second mission",
                        self.duration_s
                    ));
                }
                if !(self.drop_to_pct >= 0.0
                    && self.drop_to_pct < self.drop_from_pct
                    && self.drop_from_pct <= 100.0)
                {
                    return fail(format!(
                        "battery drop {} -> {} must satisfy 0 <= to < from <= 100",
                        self.drop_from_pct, self.drop_to_pct
                    ));
                }
                if self.overheat_ramp_c_per_s.is_nan() || self.overheat_ramp_c_per_s <= 0.0 {
                    return fail("overheat ramp must be positive".into());
                }
            }
        }
        Ok(())
    }
}

fn round2(x: f64) -> f64 {
    (x * 100.0).round() / 100.0
}

/// Generates one sample per second over the mission, deterministically for
/// a fixed seed.
pub fn generate_scenario(
    spec: &ScenarioSpec,
    seed: u64,
) -> Result<Vec<TelemetrySample>, ScenarioError> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let duration = f64::from(spec.duration_s);
    let reserve_rate = (100.0 - spec.landing_reserve_pct) / duration;
    let motors = vec![MotorStatus::Operational; spec.configuration.motor_count()];

    let mut samples = Vec::with_capacity(spec.duration_s as usize);
    for tick in 0..spec.duration_s {
        let t = f64::from(tick);
        let noise = (2.0 * rng.random::<f64>() - 1.0) * spec.temp_noise_amplitude_c;

        let (battery, temp) = match spec.kind {
            ScenarioKind::FaultFree => (100.0 - reserve_rate * t, spec.nominal_temp_c + noise),
            ScenarioKind::Faulty => {
                let x = f64::from(spec.battery_fault_at_s.expect("validated"));
                let y = f64::from(spec.overheat_at_s.expect("validated"));
                let battery = if t < x {
                    100.0 - (100.0 - spec.drop_from_pct) * t / x
                } else {
                    (spec.drop_to_pct - reserve_rate * (t - x)).max(0.0)
                };
                let ramp = if t >= y {
                    spec.overheat_ramp_c_per_s * (t - y)
                } else {
                    0.0
                };
                (battery, spec.nominal_temp_c + noise + ramp)
            }
        };

        samples.push(TelemetrySample {
            t_s: t,
            battery_pct: round2(battery),
            temp_c: round2(temp),
            motor_status: motors.clone(),
            configuration: spec.configuration,
            activity: Activity::Active,
        });
    }
    Ok(samples)
}
