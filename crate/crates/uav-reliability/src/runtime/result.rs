//! Per-tick evaluation results, mission verdicts and their output formats.

use serde::Serialize;

/// Mission action suggested by the threshold check. A reconfiguration
/// recommendation (switch to a propulsion mode that tolerates the observed
/// fault) is a planned extension of this enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Recommendation {
    #[serde(rename = "CONTINUE")]
    Continue,
    #[serde(rename = "EMERGENCY_LANDING")]
    EmergencyLanding,
}

impl std::fmt::Display for Recommendation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Recommendation::Continue => "CONTINUE",
            Recommendation::EmergencyLanding => "EMERGENCY_LANDING",
        })
    }
}

/// Failure probability and MTTF of one component at one instant.
/// `mttf_h` is infinite for components that cannot fail; JSON output
/// renders that as `null`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ComponentEval {
    pub probability: f64,
    pub mttf_h: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LeafEval {
    pub id: String,
    pub probability: f64,
    pub mttf_h: f64,
}

/// Everything the engine computes for one telemetry sample.
#[derive(Debug, Clone, Serialize)]
pub struct EvaluationResult {
    pub t_s: f64,
    pub battery: Option<ComponentEval>,
    pub propulsion: Option<ComponentEval>,
    pub processor: Option<ComponentEval>,
    /// Every leaf of the tree, in declaration order.
    pub leaves: Vec<LeafEval>,
    pub system_probability: f64,
    pub system_mttf_h: f64,
    /// The system-MTTF integral hit its cap and is a lower bound.
    pub system_mttf_capped: bool,
    pub recommendation: Recommendation,
}

/// Outcome of a whole replay.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Verdict {
    Completed,
    /// Mission aborted at the first threshold crossing (seconds).
    Aborted {
        t_s: f64,
    },
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Verdict::Completed => f.write_str("COMPLETED"),
            Verdict::Aborted { t_s } => write!(f, "ABORTED_AT {t_s}s"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ReplayOutcome {
    pub results: Vec<EvaluationResult>,
    pub verdict: Verdict,
}

pub const RESULTS_CSV_HEADER: &str = "time_s,battery_prob,battery_mttf_h,propulsion_prob,propulsion_mttf_h,processor_prob,processor_mttf_h,system_prob,system_mttf_h,recommendation";

fn hours_field(value: f64) -> String {
    if value.is_finite() {
        value.to_string()
    } else {
        "inf".into()
    }
}

fn component_fields(component: &Option<ComponentEval>) -> String {
    match component {
        Some(c) => format!("{},{}", c.probability, hours_field(c.mttf_h)),
        None => ",".into(),
    }
}

/// Renders results as CSV with one row per tick, header included.
pub fn format_results_csv(results: &[EvaluationResult]) -> String {
    let mut out = String::from(RESULTS_CSV_HEADER);
    out.push('\n');
    for r in results {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.t_s,
            component_fields(&r.battery),
            component_fields(&r.propulsion),
            component_fields(&r.processor),
            r.system_probability,
            hours_field(r.system_mttf_h),
            r.recommendation,
        ));
    }
    out
}

/// Renders results as JSON lines, one object per tick. Non-finite MTTFs
/// serialize as `null`.
pub fn format_results_json_lines(results: &[EvaluationResult]) -> String {
    let mut out = String::new();
    for r in results {
        out.push_str(&serde_json::to_string(r).expect("results serialize"));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn result() -> EvaluationResult {
        EvaluationResult {
            t_s: 3.0,
            battery: Some(ComponentEval {
                probability: 0.25,
                mttf_h: 120.5,
            }),
            propulsion: Some(ComponentEval {
                probability: 0.1,
                mttf_h: 250.0,
            }),
            processor: None,
            leaves: vec![LeafEval {
                id: "never".into(),
                probability: 0.0,
                mttf_h: f64::INFINITY,
            }],
            system_probability: 0.325,
            system_mttf_h: 98.0,
            system_mttf_capped: false,
            recommendation: Recommendation::Continue,
        }
    }

    #[test]
    fn csv_row_count_and_columns_are_stable() {
        let text = format_results_csv(&[result(), result()]);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[0], RESULTS_CSV_HEADER);
        assert_eq!(lines[1].split(',').count(), 10);
        assert!(lines[1].ends_with("CONTINUE"));
    }

    #[test]
    fn infinite_mttf_serializes_as_null_in_json() {
        let line = format_results_json_lines(&[result()]);
        let value: serde_json::Value = serde_json::from_str(line.trim()).unwrap();
        assert!(value["leaves"][0]["mttf_h"].is_null());
        assert_eq!(value["recommendation"], "CONTINUE");
        assert!(value["processor"].is_null());
    }

    #[test]
    fn verdict_display_format() {
        assert_eq!(Verdict::Completed.to_string(), "COMPLETED");
        assert_eq!(
            Verdict::Aborted { t_s: 626.0 }.to_string(),
            "ABORTED_AT 626s"
        );
    }
}
