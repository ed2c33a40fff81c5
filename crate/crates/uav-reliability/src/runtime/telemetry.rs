//! Telemetry samples and their CSV wire format.
//!
//! CSV header: `time_s,battery_pct,temp_c,motor_status,config,activity`.
//! `motor_status` is a string of `O`/`F` characters, one per motor in the
//! configuration's order; `activity` is `active` or `inactive`. Floats are
//! written with Rust's shortest round-trip formatting, so a
//! write-then-parse cycle reproduces every field exactly.

use super::RuntimeError;
use crate::models::{Activity, MotorConfiguration, MotorStatus, SymptomReading};
use std::path::Path;
use std::str::FromStr;

pub const TELEMETRY_CSV_HEADER: &str = "time_s,battery_pct,temp_c,motor_status,config,activity";

/// One timestamped observation from the vehicle.
#[derive(Debug, Clone, PartialEq)]
pub struct TelemetrySample {
    /// Seconds since mission start; strictly increasing within a stream.
    pub t_s: f64,
    pub battery_pct: f64,
    pub temp_c: f64,
    pub motor_status: Vec<MotorStatus>,
    pub configuration: MotorConfiguration,
    pub activity: Activity,
}

impl TelemetrySample {
    pub fn validate(&self) -> Result<(), RuntimeError> {
        if self.t_s < 0.0 || !self.t_s.is_finite() {
            return Err(RuntimeError::InvalidSample(format!(
                "timestamp {} must be non-negative",
                self.t_s
            )));
        }
        SymptomReading::new(
            self.configuration,
            self.motor_status.clone(),
            self.battery_pct,
            self.temp_c,
        )
        .map_err(|e| RuntimeError::InvalidSample(e.to_string()))?;
        Ok(())
    }

    pub fn symptom(&self) -> SymptomReading {
        SymptomReading {
            configuration: self.configuration,
            motor_status: self.motor_status.clone(),
            battery_level: self.battery_pct,
            processor_temp: self.temp_c,
        }
    }

    pub fn motor_pattern(&self) -> String {
        self.motor_status.iter().map(|s| s.as_char()).collect()
    }
}

fn activity_label(activity: Activity) -> &'static str {
    match activity {
        Activity::Active => "active",
        Activity::Inactive => "inactive",
    }
}

/// Renders samples as CSV, header included.
pub fn format_telemetry_csv(samples: &[TelemetrySample]) -> String {
    let mut out = String::from(TELEMETRY_CSV_HEADER);
    out.push('\n');
    for s in samples {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            s.t_s,
            s.battery_pct,
            s.temp_c,
            s.motor_pattern(),
            s.configuration,
            activity_label(s.activity),
        ));
    }
    out
}

pub fn write_telemetry_csv(path: &Path, samples: &[TelemetrySample]) -> Result<(), RuntimeError> {
    std::fs::write(path, format_telemetry_csv(samples))?;
    Ok(())
}

/// Parses a telemetry CSV document; field errors carry 1-based line numbers.
pub fn parse_telemetry_csv(text: &str) -> Result<Vec<TelemetrySample>, RuntimeError> {
    let mut lines = text.lines().enumerate();
    let header = loop {
        match lines.next() {
            Some((_, line)) if line.trim().is_empty() => continue,
            Some((n, line)) => break (n, line),
            None => {
                return Err(RuntimeError::Telemetry {
                    line: 1,
                    message: "empty document".into(),
                })
            }
        }
    };
    if header.1.trim() != TELEMETRY_CSV_HEADER {
        return Err(RuntimeError::Telemetry {
            line: header.0 + 1,
            message: format!("expected header `{TELEMETRY_CSV_HEADER}`"),
        });
    }
    let mut samples = Vec::new();
    for (index, raw) in lines {
        let line = index + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = raw.split(',').collect();
        if fields.len() != 6 {
            return Err(RuntimeError::Telemetry {
                line,
                message: format!("expected 6 fields, got {}", fields.len()),
            });
        }
        let number = |what: &str, text: &str| -> Result<f64, RuntimeError> {
            text.parse::<f64>().map_err(|_| RuntimeError::Telemetry {
                line,
                message: format!("invalid {what} `{text}`"),
            })
        };
        let t_s = number("time", fields[0])?;
        let battery_pct = number("battery level", fields[1])?;
        let temp_c = number("temperature", fields[2])?;
        let configuration =
            MotorConfiguration::from_str(fields[4]).map_err(|e| RuntimeError::Telemetry {
                line,
                message: e.to_string(),
            })?;
        let motor_status: Vec<MotorStatus> = fields[3]
            .chars()
            .map(MotorStatus::from_char)
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| RuntimeError::Telemetry {
                line,
                message: format!("motor status `{}` must be O/F characters", fields[3]),
            })?;
        let activity = match fields[5] {
            "active" => Activity::Active,
            "inactive" => Activity::Inactive,
            other => {
                return Err(RuntimeError::Telemetry {
                    line,
                    message: format!("activity `{other}` must be active or inactive"),
                })
            }
        };
        let sample = TelemetrySample {
            t_s,
            battery_pct,
            temp_c,
            motor_status,
            configuration,
            activity,
        };
        sample.validate().map_err(|e| RuntimeError::Telemetry {
            line,
            message: e.to_string(),
        })?;
        samples.push(sample);
    }
    Ok(samples)
}

pub fn read_telemetry_csv(path: &Path) -> Result<Vec<TelemetrySample>, RuntimeError> {
    let text = std::fs::read_to_string(path)?;
    parse_telemetry_csv(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(t: f64) -> TelemetrySample {
        TelemetrySample {
            t_s: t,
            battery_pct: 97.43,
            temp_c: 29.18,
            motor_status: vec![MotorStatus::Operational; 4],
            configuration: MotorConfiguration::Pnpn,
            activity: Activity::Active,
        }
    }

    #[test]
    fn round_trip_is_field_exact() {
        let samples = vec![sample(0.0), sample(1.0), sample(2.0)];
        let text = format_telemetry_csv(&samples);
        let parsed = parse_telemetry_csv(&text).unwrap();
        assert_eq!(parsed, samples);
    }

    #[test]
    fn header_is_checked() {
        let err = parse_telemetry_csv("time,battery\n1,2\n").unwrap_err();
        assert!(matches!(err, RuntimeError::Telemetry { line: 1, .. }));
    }

    #[test]
    fn field_errors_carry_line_numbers() {
        let text =
            format!("{TELEMETRY_CSV_HEADER}\n0,98,29,OOOO,PNPN,active\n1,98,29,OOXO,PNPN,active\n");
        let err = parse_telemetry_csv(&text).unwrap_err();
        assert!(matches!(err, RuntimeError::Telemetry { line: 3, .. }));
    }

    #[test]
    fn out_of_bounds_sample_rejected() {
        let text = format!("{TELEMETRY_CSV_HEADER}\n0,150,29,OOOO,PNPN,active\n");
        assert!(parse_telemetry_csv(&text).is_err());
    }

    #[test]
    fn motor_length_must_match_configuration() {
        let text = format!("{TELEMETRY_CSV_HEADER}\n0,90,29,OOO,PNPN,active\n");
        assert!(parse_telemetry_csv(&text).is_err());
    }
}
