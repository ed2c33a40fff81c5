//! Arrhenius-derated processor reliability.
//!
//! Elevated temperature shortens the processor's expected lifetime by the
//! acceleration factor
//!
//! ```text
//! AF = exp((Ea / k) * (1/Tr - 1/Ta))        (temperatures in Kelvin)
//! MTTF(Ta) = MTTF_ref / AF
//! ```
//!
//! Failure probability over a temperature history accumulates hazard
//! piecewise: each segment of `d` hours at temperature `T` contributes
//! `d / MTTF(T)`, and `P = 1 - exp(-total hazard)`.

use super::ModelsError;

pub const CELSIUS_TO_KELVIN_OFFSET: f64 = 273.15;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProcessorParams {
    /// Expected lifetime at the reference temperature, hours.
    pub mttf_ref: f64,
    /// Activation energy Ea, electron-volts.
    pub activation_energy: f64,
    /// Boltzmann constant k, eV/Kelvin.
    pub boltzmann: f64,
    /// Reference temperature, degrees Celsius.
    pub ref_temperature: f64,
    /// Utilization fraction in [0, 1]. Carried for configuration
    /// completeness; it does not enter the lifetime equations.
    pub utilization: f64,
}

impl ProcessorParams {
    pub fn new(
        mttf_ref: f64,
        activation_energy: f64,
        boltzmann: f64,
        ref_temperature: f64,
        utilization: f64,
    ) -> Result<Self, ModelsError> {
        for (name, value) in [
            ("reference MTTF", mttf_ref),
            ("activation energy", activation_energy),
            ("Boltzmann constant", boltzmann),
        ] {
            if !value.is_finite() || value <= 0.0 {
                return Err(ModelsError::NonPositive { name, value });
            }
        }
        if ref_temperature <= -CELSIUS_TO_KELVIN_OFFSET {
            return Err(ModelsError::NonphysicalTemperature(ref_temperature));
        }
        if !(0.0..=1.0).contains(&utilization) {
            return Err(ModelsError::UtilizationOutOfRange(utilization));
        }
        Ok(ProcessorParams {
            mttf_ref,
            activation_energy,
            boltzmann,
            ref_temperature,
            utilization,
        })
    }
}

impl Default for ProcessorParams {
    /// 1000 h reference lifetime at 29 C, Ea = 0.3 eV, k = 8.617e-5 eV/K,
    /// full utilization.
    fn default() -> Self {
        ProcessorParams {
            mttf_ref: 1000.0,
            activation_energy: 0.3,
            boltzmann: 8.617e-5,
            ref_temperature: 29.0,
            utilization: 1.0,
        }
    }
}

/// Acceleration factor at the actual temperature `ta_c` (Celsius).
///
/// Exactly 1 when `ta_c` equals the reference temperature, above 1 when
/// hotter, below 1 when cooler.
pub fn arrhenius_acceleration(ta_c: f64, params: &ProcessorParams) -> Result<f64, ModelsError> {
    if ta_c <= -CELSIUS_TO_KELVIN_OFFSET || !ta_c.is_finite() {
        return Err(ModelsError::NonphysicalTemperature(ta_c));
    }
    let tr_k = params.ref_temperature + CELSIUS_TO_KELVIN_OFFSET;
    let ta_k = ta_c + CELSIUS_TO_KELVIN_OFFSET;
    let exponent = params.activation_energy / params.boltzmann * (1.0 / tr_k - 1.0 / ta_k);
    Ok(exponent.exp())
}

/// Expected lifetime (hours) at the actual temperature: `MTTF_ref / AF`.
pub fn processor_mttf(params: &ProcessorParams, ta_c: f64) -> Result<f64, ModelsError> {
    Ok(params.mttf_ref / arrhenius_acceleration(ta_c, params)?)
}

/// One stretch of operation at a constant temperature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TemperatureSegment {
    pub duration_h: f64,
    pub temperature_c: f64,
}

/// Failure probability accumulated over a piecewise-constant temperature
/// history: `1 - exp(-Σ duration / MTTF(T))`.
pub fn processor_failure_probability(
    history: &[TemperatureSegment],
    params: &ProcessorParams,
) -> Result<f64, ModelsError> {
    let mut hazard = 0.0f64;
    for segment in history {
        if segment.duration_h < 0.0 || !segment.duration_h.is_finite() {
            return Err(ModelsError::NegativeDuration(segment.duration_h));
        }
        hazard += segment.duration_h / processor_mttf(params, segment.temperature_c)?;
    }
    Ok(1.0 - (-hazard).exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_temperature_gives_unit_factor() {
        let params = ProcessorParams::default();
        assert_eq!(arrhenius_acceleration(29.0, &params).unwrap(), 1.0);
        assert_eq!(processor_mttf(&params, 29.0).unwrap(), 1000.0);
    }

    #[test]
    fn ten_degrees_hotter_matches_reference_value() {
        // Independently evaluated: exp((0.3/8.617e-5) * (1/302.15 - 1/312.15)).
        let expected = 1.4464754872680814;
        let params = ProcessorParams::default();
        let af = arrhenius_acceleration(39.0, &params).unwrap();
        assert!((af - expected).abs() / expected < 1e-12, "{af}");
        let mttf = processor_mttf(&params, 39.0).unwrap();
        assert!((mttf - 1000.0 / expected).abs() < 1e-9);
    }

    #[test]
    fn mttf_is_reference_over_factor() {
        let params = ProcessorParams::default();
        for ta in [5.0, 39.0, 64.0, 101.0] {
            let factor = arrhenius_acceleration(ta, &params).unwrap();
            let mttf = processor_mttf(&params, ta).unwrap();
            assert_eq!(mttf, params.mttf_ref / factor);
        }
        // Doubling the factor halves the lifetime (AF = 2 near 48.34 C).
        let doubled = arrhenius_acceleration(48.3397108, &params).unwrap();
        assert!((doubled - 2.0).abs() < 1e-7);
        assert!((processor_mttf(&params, 48.3397108).unwrap() - 500.0).abs() < 1e-4);
    }

    #[test]
    fn cooler_temperature_slows_aging() {
        let params = ProcessorParams::default();
        assert!(arrhenius_acceleration(19.0, &params).unwrap() < 1.0);
        assert!(processor_mttf(&params, 19.0).unwrap() > 1000.0);
    }

    #[test]
    fn factor_is_strictly_increasing_in_temperature() {
        let params = ProcessorParams::default();
        let mut previous = 0.0;
        for t in (-20..=120).step_by(5) {
            let af = arrhenius_acceleration(t as f64, &params).unwrap();
            assert!(af > previous);
            previous = af;
        }
    }

    #[test]
    fn empty_history_has_no_exposure() {
        let params = ProcessorParams::default();
        assert_eq!(processor_failure_probability(&[], &params).unwrap(), 0.0);
    }

    #[test]
    fn one_lifetime_at_reference_is_one_minus_inverse_e() {
        let params = ProcessorParams::default();
        let p = processor_failure_probability(
            &[TemperatureSegment {
                duration_h: 1000.0,
                temperature_c: 29.0,
            }],
            &params,
        )
        .unwrap();
        assert!((p - (1.0 - (-1.0f64).exp())).abs() < 1e-12);
    }

    #[test]
    fn mixed_history_sums_hazards() {
        let params = ProcessorParams::default();
        let af = arrhenius_acceleration(39.0, &params).unwrap();
        let p = processor_failure_probability(
            &[
                TemperatureSegment {
                    duration_h: 500.0,
                    temperature_c: 29.0,
                },
                TemperatureSegment {
                    duration_h: 500.0,
                    temperature_c: 39.0,
                },
            ],
            &params,
        )
        .unwrap();
        let expected = 1.0 - (-(0.5 + 500.0 * af / 1000.0)).exp();
        assert!((p - expected).abs() < 1e-12);
    }

    #[test]
    fn hazard_is_additive_under_segment_splits() {
        let params = ProcessorParams::default();
        let whole = processor_failure_probability(
            &[TemperatureSegment {
                duration_h: 240.0,
                temperature_c: 55.0,
            }],
            &params,
        )
        .unwrap();
        let halves = processor_failure_probability(
            &[
                TemperatureSegment {
                    duration_h: 120.0,
                    temperature_c: 55.0,
                },
                TemperatureSegment {
                    duration_h: 120.0,
                    temperature_c: 55.0,
                },
            ],
            &params,
        )
        .unwrap();
        assert!((whole - halves).abs() <= 1e-12);
    }

    #[test]
    fn nonphysical_temperatures_are_rejected() {
        let params = ProcessorParams::default();
        assert!(matches!(
            arrhenius_acceleration(-273.15, &params),
            Err(ModelsError::NonphysicalTemperature(_))
        ));
        assert!(ProcessorParams::new(1000.0, 0.3, 8.617e-5, -280.0, 1.0).is_err());
    }
}
