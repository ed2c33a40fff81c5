//! Banded battery degradation model.
//!
//! The battery is discretized into four operational bands of 25% each plus
//! an absorbing failed state:
//!
//! ```text
//! B100 -> B75 -> B50 -> B25 -> BFailed
//! ```
//!
//! Adjacent bands are linked by the degradation rate `D` plus the usage
//! rate `α` while the vehicle is active (the inactivity rate `β` replaces
//! `α` when a sample is flagged inactive), and every operational band also
//! fails directly at the battery failure rate `λ_b`.

use super::{Activity::*, ModelsError};
use crate::markov::MarkovModel;

/// State labels of the battery chain, healthiest first.
pub const BATTERY_BAND_LABELS: [&str; 5] = ["B100", "B75", "B50", "B25", "BFailed"];

/// Whether the vehicle is flying a mission or sitting idle; selects which
/// of the two usage-dependent degradation rates applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Activity {
    Active,
    Inactive,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BatteryParams {
    /// Direct failure rate λ_b, 1/hour.
    pub failure_rate: f64,
    /// Degradation rate D, 1/hour.
    pub degradation_rate: f64,
    /// Usage rate α applied while active, 1/hour.
    pub usage_rate: f64,
    /// Inactivity rate β applied while idle, 1/hour.
    pub inactivity_rate: f64,
}

impl BatteryParams {
    pub fn new(
        failure_rate: f64,
        degradation_rate: f64,
        usage_rate: f64,
        inactivity_rate: f64,
    ) -> Result<Self, ModelsError> {
        if !failure_rate.is_finite() || failure_rate <= 0.0 {
            return Err(ModelsError::NonPositive {
                name: "battery failure rate",
                value: failure_rate,
            });
        }
        for (name, value) in [
            ("degradation rate", degradation_rate),
            ("usage rate", usage_rate),
            ("inactivity rate", inactivity_rate),
        ] {
            if value < 0.0 || !value.is_finite() {
                return Err(ModelsError::Negative { name, value });
            }
        }
        Ok(BatteryParams {
            failure_rate,
            degradation_rate,
            usage_rate,
            inactivity_rate,
        })
    }

    /// Band-to-band rate for the given activity: `D + α` or `D + β`.
    pub fn band_transition_rate(&self, activity: Activity) -> f64 {
        self.degradation_rate
            + match activity {
                Active => self.usage_rate,
                Inactive => self.inactivity_rate,
            }
    }
}

impl Default for BatteryParams {
    /// λ_b = 0.0001, D = 0.0064, α = 0.008, β = 0.007 (per hour).
    fn default() -> Self {
        BatteryParams {
            failure_rate: 0.0001,
            degradation_rate: 0.0064,
            usage_rate: 0.008,
            inactivity_rate: 0.007,
        }
    }
}

/// Battery chain for an active mission (`D + α` between bands).
pub fn build_battery_model(params: &BatteryParams) -> MarkovModel {
    build_battery_model_for(params, Active)
}

/// Battery chain with the band rate selected by `activity`.
pub fn build_battery_model_for(params: &BatteryParams, activity: Activity) -> MarkovModel {
    let band_rate = params.band_transition_rate(activity);
    let direct = params.failure_rate;
    let mut transitions: Vec<(&str, &str, f64)> = Vec::new();
    for i in 0..4 {
        let from = BATTERY_BAND_LABELS[i];
        let next = BATTERY_BAND_LABELS[i + 1];
        if i < 3 {
            if band_rate > 0.0 {
                transitions.push((from, next, band_rate));
            }
            transitions.push((from, "BFailed", direct));
        } else {
            // B25's next band is the failed state itself.
            transitions.push((from, "BFailed", band_rate + direct));
        }
    }
    MarkovModel::from_rates(&BATTERY_BAND_LABELS, &transitions, &["BFailed"])
        .expect("battery chain structure is valid")
}

/// Band index for a measured battery level (percent).
///
/// Boundaries are inclusive from below: 75% still counts as the full band,
/// 74.9% falls into the next one; exactly 0% is the failed state.
pub fn battery_state_from_level(level: f64) -> Result<usize, ModelsError> {
    if !(0.0..=100.0).contains(&level) {
        return Err(ModelsError::LevelOutOfRange(level));
    }
    Ok(if level >= 75.0 {
        0
    } else if level >= 50.0 {
        1
    } else if level >= 25.0 {
        2
    } else if level > 0.0 {
        3
    } else {
        4
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::markov::mttf_from_state;

    #[test]
    fn default_chain_shape() {
        let model = build_battery_model(&BatteryParams::default());
        assert_eq!(model.state_count(), 5);
        assert_eq!(model.absorbing_states().len(), 1);
        assert!(model.is_absorbing(4));
        let mttf = mttf_from_state(&model, 0).unwrap();
        assert!(mttf.is_finite() && mttf > 0.0);
    }

    #[test]
    fn pure_exponential_when_degradation_is_off() {
        let params = BatteryParams::new(0.0001, 0.0, 0.0, 0.0).unwrap();
        let model = build_battery_model(&params);
        for band in 0..4 {
            let mttf = mttf_from_state(&model, band).unwrap();
            assert!((mttf - 10_000.0).abs() < 1e-6, "band {band}: {mttf}");
        }
    }

    #[test]
    fn lower_bands_fail_sooner() {
        let model = build_battery_model(&BatteryParams::default());
        let mttfs: Vec<f64> = (0..4)
            .map(|b| mttf_from_state(&model, b).unwrap())
            .collect();
        assert!(mttfs[3] < mttfs[2]);
        assert!(mttfs[2] < mttfs[1]);
        assert!(mttfs[1] < mttfs[0]);
    }

    #[test]
    fn inactive_chain_uses_beta() {
        let params = BatteryParams::default();
        let active = build_battery_model_for(&params, Active);
        let idle = build_battery_model_for(&params, Inactive);
        assert!((active.exit_rate(0).unwrap() - (0.0144 + 0.0001)).abs() < 1e-15);
        assert!((idle.exit_rate(0).unwrap() - (0.0134 + 0.0001)).abs() < 1e-15);
    }

    #[test]
    fn band_boundaries_are_inclusive_from_below() {
        assert_eq!(battery_state_from_level(100.0).unwrap(), 0);
        assert_eq!(battery_state_from_level(75.0).unwrap(), 0);
        assert_eq!(battery_state_from_level(74.9).unwrap(), 1);
        assert_eq!(battery_state_from_level(50.0).unwrap(), 1);
        assert_eq!(battery_state_from_level(40.0).unwrap(), 2);
        assert_eq!(battery_state_from_level(25.0).unwrap(), 2);
        assert_eq!(battery_state_from_level(10.0).unwrap(), 3);
        assert_eq!(battery_state_from_level(0.0).unwrap(), 4);
        assert!(battery_state_from_level(-1.0).is_err());
        assert!(battery_state_from_level(100.5).is_err());
        assert!(battery_state_from_level(f64::NAN).is_err());
    }

    #[test]
    fn band_mapping_is_monotone() {
        let mut previous = 0;
        let mut level = 100.0;
        while level >= 0.0 {
            let band = battery_state_from_level(level).unwrap();
            assert!(band >= previous, "level {level} mapped to healthier band");
            previous = band;
            level -= 0.25;
        }
    }
}
